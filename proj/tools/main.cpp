#include "symflow/cli.hpp"

int main(int argc, char** argv) { return symflow::cli::run(argc, argv); }
