#include "cli.hpp"

int main(int argc, char** argv)
{
    return harnack::cli::run_cli(argc, argv);
}
