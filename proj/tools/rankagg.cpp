#include "rankagg/cli.hpp"

int main(int argc, char** argv) { return rankagg::cli::run(argc, argv); }
