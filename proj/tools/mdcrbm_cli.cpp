#include "mdcrbm/commands.hpp"

int main(int argc, char** argv) { return mdcrbm::run_cli(argc, argv); }
