#include "carve/cli.hpp"

int main(int argc, char** argv) { return carve::cli::cli_main(argc, argv); }
