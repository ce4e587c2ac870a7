// qsc_main.cpp: entry point of the qsc command-line tool

#include "qsc/cli.hpp"

int main(int argc, char** argv)
{
    return qsc::run_cli(argc, argv);
}
