#include "quadnet/cli.hpp"

int main(int argc, char** argv) { return quadnet::run_cli(argc, argv); }
