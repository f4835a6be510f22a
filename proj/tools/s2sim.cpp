#include <iostream>

#include "s2sim/cli.hpp"

int main(int argc, char **argv)
{
    return s2sim::cli_main(argc, argv, std::cout, std::cerr);
}
