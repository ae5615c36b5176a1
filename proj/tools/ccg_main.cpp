#include "ccg/cli.hpp"

int main(int argc, char** argv) { return ccg::run_cli(argc, argv); }
