#include <iostream>

#include "tailscore/experiments.hpp"

int main(int argc, char** argv) { return tailscore::run_cli(argc, argv, std::cout, std::cerr); }
