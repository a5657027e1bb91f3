#include "fracreg/cli/runner.hpp"

int main(int argc, char** argv)
{
    return fracreg::cli::main_entry(argc, argv);
}
