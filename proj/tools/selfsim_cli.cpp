#include "selfsim/cli.hpp"

int main(int argc, char** argv) { return selfsim::cli_main(argc, argv); }
