#include "mvw/cli.hpp"

int main(int argc, char** argv) { return mvw::run_cli(argc, argv); }
