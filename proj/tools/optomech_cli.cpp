#include "optomech/cli.hpp"

int main(int argc, char** argv) { return optomech::cli::run(argc, argv); }
