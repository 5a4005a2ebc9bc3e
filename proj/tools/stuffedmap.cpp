#include "stuffedmap/cli.hpp"

int main(int argc, char** argv) { return smap::cli::run(argc, argv); }
