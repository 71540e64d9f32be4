#include "lrflow/commands.hpp"

int main(int argc, char** argv) { return lrflow::cli_main(argc, argv); }
