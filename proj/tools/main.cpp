#include "cli.hpp"

int main(int argc, char** argv) { return fakedet::cli::run_cli(argc, argv); }
