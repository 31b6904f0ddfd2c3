#include "scrollbin/cli.hpp"

int main(int argc, char** argv) { return scrollbin::cli::dispatch(argc, argv); }
