#include "plver/cli.hpp"

int main(int argc, char** argv) { return plver::run_cli(argc, argv); }
