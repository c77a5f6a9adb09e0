#include <iostream>

#include "seqdetect/cli.hpp"

int main(int argc, char** argv)
{
    return seqdetect::run(argc, argv, std::cout, std::cerr);
}
