#include "lietx_cli.hpp"

int main(int argc, char** argv) { return lietx::cli::run(argc, argv); }
