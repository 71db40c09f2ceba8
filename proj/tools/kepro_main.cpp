#include "kepro/cli.hpp"

int main(int argc, char** argv) { return kepro::run_cli(argc, argv); }
