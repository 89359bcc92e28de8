#include <iostream>

#include <simm_cli/cli.hpp>

int main(int argc, char** argv)
{
    return simm::cli::run(argc, argv, std::cout, std::cerr);
}
