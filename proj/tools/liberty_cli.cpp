#include <liberty/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return liberty::cli::run(argc, argv, std::cout, std::cerr); }
