#include "salient/cli.hpp"

int main(int argc, char** argv) { return salient::run_cli(argc, argv); }
