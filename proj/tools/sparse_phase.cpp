#include <iostream>

#include <sparse_phase/cli.hpp>

int main(int argc, char** argv)
{
    return sparse_phase::cli::run(argc, argv, std::cout, std::cerr);
}
