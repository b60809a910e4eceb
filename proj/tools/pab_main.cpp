#include "pab/cli.hpp"

int main(int argc, char** argv) { return pab::cli::run(argc, argv); }
