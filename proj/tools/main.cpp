#include "commands.hpp"

int main(int argc, char** argv) { return gpcycle::cli::run(argc, argv); }
