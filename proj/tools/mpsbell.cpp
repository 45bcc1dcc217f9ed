#include "commands.hpp"

int main(int argc, char **argv) { return mpsbell::cli::run_cli(argc, argv); }
