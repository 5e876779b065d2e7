#include <iostream>

#include "bowenlab/report.hpp"

int main(int argc, char** argv) { return bowenlab::run(argc, argv, std::cout, std::cerr); }
