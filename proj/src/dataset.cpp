#include "scrollbin/dataset.hpp"

#include <algorithm>

#include "scrollbin/imageops.hpp"
#include "scrollbin/pnm.hpp"

namespace scrollbin {

InputMode parse_input_mode(const std::string& name) {
    if (name == "gray") return InputMode::Gray;
    if (name == "color") return InputMode::Color;
    if (name == "fused") return InputMode::Fused;
    throw PreconditionError("unknown input mode '" + name + "' (gray|color|fused)");
}

int input_channels(InputMode mode) { return mode == InputMode::Gray ? 1 : 3; }

InputImage load_any_input(const std::filesystem::path& path) {
    auto img = pnm::read(path);
    if (auto* g = std::get_if<GrayImage>(&img)) return std::move(*g);
    if (auto* c = std::get_if<RgbImage>(&img)) return std::move(*c);
    throw DataError(path.string() + ": expected a PGM or PPM image, found PBM");
}

InputImage load_input(const std::filesystem::path& path, InputMode mode) {
    auto img = load_any_input(path);
    if (mode == InputMode::Gray) {
        if (auto* c = std::get_if<RgbImage>(&img)) return to_grayscale(*c);
        return img;
    }
    if (std::holds_alternative<GrayImage>(img)) {
        throw DataError(path.string() + ": 3-channel input mode needs a PPM image");
    }
    return img;
}

std::vector<LabeledImage> load_dataset(const std::filesystem::path& dir, InputMode mode) {
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    const std::string suffix = ".gt.pbm";
    std::vector<std::string> stems;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with(suffix)) stems.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(stems.begin(), stems.end());
    std::vector<LabeledImage> out;
    for (const auto& stem : stems) {
        std::filesystem::path img_path;
        for (const char* ext : {".pgm", ".ppm"}) {
            const auto candidate = dir / (stem + ext);
            if (std::filesystem::exists(candidate)) {
                img_path = candidate;
                break;
            }
        }
        if (img_path.empty()) throw DataError("ground truth " + stem + suffix + " has no matching .pgm/.ppm image");
        LabeledImage li{stem, load_input(img_path, mode), pnm::read_mask(dir / (stem + suffix))};
        std::visit([&](const auto& im) { require_same_size(im, li.gt, ("dataset pair " + stem).c_str()); }, li.image);
        out.push_back(std::move(li));
    }
    if (out.empty()) throw DataError("no <stem>.gt.pbm files found in " + dir.string());
    return out;
}

std::vector<binet::Sample> make_samples(const InputImage& image, const BinaryMask& gt, int patch_size, PadMode pad) {
    const auto mask_grid = split(gt, patch_size, pad);
    std::vector<binet::Sample> out;
    std::visit(
        [&](const auto& im) {
            require_same_size(im, gt, "make_samples");
            const auto grid = split(im, patch_size, pad);
            for (std::size_t i = 0; i < grid.patches.size(); ++i) {
                out.push_back({binet::normalize_input(grid.patches[i]), binet::mask_to_target(mask_grid.patches[i])});
            }
        },
        image);
    return out;
}

}  // namespace scrollbin
