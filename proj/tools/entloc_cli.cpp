#include "entloc/experiments.hpp"

int main(int argc, char** argv) { return entloc::cli_main(argc, argv); }
