#include "lindblad/cli.hpp"

int main(int argc, char** argv) { return lindblad::cli::run(argc, argv); }
