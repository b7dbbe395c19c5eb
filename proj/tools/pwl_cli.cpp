#include "pwl/cli.hpp"

int main(int argc, char** argv) { return pwl::run_cli(argc, argv); }
