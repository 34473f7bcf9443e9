#include "algoevo/cli.hpp"

int main(int argc, char** argv) { return algoevo::cli::run(argc, argv); }
