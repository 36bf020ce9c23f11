#include "monofact/cli_io.hpp"

int main(int argc, char** argv) { return monofact::cli_main(argc, argv); }
