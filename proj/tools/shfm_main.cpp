#include "shfm/cli.hpp"

int main(int argc, char **argv) { return shfm::cli::run(argc, argv); }
