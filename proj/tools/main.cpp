#include "bltk/cli.hpp"

int main(int argc, char** argv) { return bltk::cli::run(argc, argv); }
