#include "testinv/cli.hpp"

int main(int argc, char** argv)
{
    return testinv::cli::run(argc, argv);
}
