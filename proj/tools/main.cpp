#include "virlab/cli_harness.hpp"

int main(int argc, char** argv) { return virlab::cli::run(argc, argv); }
