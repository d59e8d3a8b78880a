#include "scarfsim/cli.hpp"

int main(int argc, char** argv) { return scarfsim::run_cli(argc, argv); }
