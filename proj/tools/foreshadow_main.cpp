#include "foreshadow/cli.hpp"

int main(int argc, char** argv) { return foreshadow::cli::run(argc, argv); }
