#include "slqg/cli.hpp"

int main(int argc, char** argv) { return slqg::cli_dispatch(argc, argv); }
