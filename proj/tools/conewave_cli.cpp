#include "conewave/cli.hpp"

int main(int argc, char** argv) { return conewave::cli::run(argc, argv); }
