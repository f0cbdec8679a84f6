#include "cli.hpp"

int main(int argc, char** argv) { return graper::cli::run(argc, argv); }
