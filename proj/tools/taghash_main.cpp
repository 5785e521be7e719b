#include "taghash/cli.hpp"

int main(int argc, char** argv) { return taghash::run_cli(argc, argv); }
