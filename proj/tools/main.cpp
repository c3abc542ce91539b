#include "cli.hpp"

int main(int argc, char **argv)
{
    return hpsogwo::cli::run(argc, argv);
}
