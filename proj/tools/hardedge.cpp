#include "hardedge/cli.hpp"

int main(int argc, char** argv) { return hardedge::cli::run_cli(argc, argv); }
