#include <iostream>

#include "agentcoord/cli.hpp"

int main(int argc, char** argv) { return agentcoord::cli::run(argc, argv, std::cout, std::cerr); }
