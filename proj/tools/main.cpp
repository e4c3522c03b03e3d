#include "fluxpop/cli.hpp"

int main(int argc, char** argv) { return fluxpop::cli::run_cli(argc, argv); }
