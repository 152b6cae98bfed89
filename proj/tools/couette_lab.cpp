#include "couette/exp/commands.hpp"

int main(int argc, char** argv) { return couette::exp::run_cli(argc, argv); }
