#include "commands.hpp"

int main(int argc, char** argv) { return wavespec::cli::run_cli(argc, argv); }
