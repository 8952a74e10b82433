#include "cli.hpp"

int main(int argc, char** argv) { return chessmap::cli::run(argc, argv); }
