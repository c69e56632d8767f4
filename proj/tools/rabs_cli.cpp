#include "rabs/cli.hpp"

int main(int argc, char** argv) { return rabs::cli::run(argc, argv); }
