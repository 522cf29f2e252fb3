#include "nonessential/cli.hpp"

int main(int argc, char** argv) { return nonessential::run_cli(argc, argv); }
