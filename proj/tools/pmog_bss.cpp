#include "pmog/cli.hpp"

int main(int argc, char** argv) { return pmog::cli::run(argc, argv); }
