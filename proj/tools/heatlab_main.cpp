#include "heatlab/cli.hpp"

int main(int argc, char** argv) { return heatlab::cli::run_main(argc, argv); }
