#include "tddyn/cli.hpp"

int main(int argc, char** argv) { return tddyn::cli::main(argc, argv); }
