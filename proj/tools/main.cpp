#include <unistd.h>

#include "thinslab/cli.hpp"

int main(int argc, char** argv) { return thinslab::cli::run(argc, argv, environ); }
