#include "legalie/cli.hpp"

int main(int argc, char** argv) { return legalie::cli::run_cli(argc, argv); }
