#include "lccf/cli.hpp"

int main(int argc, char** argv)
{
    return lccf::run_cli(argc, argv);
}
