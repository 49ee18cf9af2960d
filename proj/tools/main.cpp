#include "cli.hpp"

int main(int argc, char** argv) { return dce::cli::run(argc, argv); }
