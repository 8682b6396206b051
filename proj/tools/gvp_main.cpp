#include "gvp/cli.hpp"

int main(int argc, char** argv) { return gvp::cli::run_main(argc, argv); }
