#include "bregpower/cli.hpp"

int main(int argc, char** argv) { return bregpower::cli::run(argc, argv); }
