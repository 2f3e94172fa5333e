#include "fanlab/cli/commands.hpp"

int main(int argc, char** argv) { return fanlab::cli::main_entry(argc, argv); }
