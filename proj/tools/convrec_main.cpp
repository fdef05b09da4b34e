#include "convrec/cli.hpp"

int main(int argc, char** argv) { return convrec::cli::run(argc, argv); }
