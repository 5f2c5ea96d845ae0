#include "appealgate/cli/commands.hpp"

int main(int argc, char** argv) { return appealgate::cli::run(argc, argv); }
