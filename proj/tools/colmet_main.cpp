#include "colmet/cli.hpp"

int main(int argc, char** argv) { return colmet::run_cli(argc, argv); }
