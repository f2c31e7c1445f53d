#include "held_cli.hpp"

int main(int argc, char** argv) { return held::cli::run(argc, argv); }
