#include "albench/cli.hpp"

int main(int argc, char** argv) { return albench::cli::main(argc, argv); }
