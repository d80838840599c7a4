#include "hoc/cli.hpp"

int main(int argc, char** argv) { return hoc::run_cli(argc, argv); }
