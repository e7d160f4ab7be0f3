#include "singdet/cli.hpp"

int main(int argc, char** argv) { return singdet::cli::run(argc, argv); }
