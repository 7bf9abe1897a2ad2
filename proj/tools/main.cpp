#include "splitsim/cli.hpp"

int main(int argc, char** argv) { return splitsim::cli_main(argc, argv); }
