#include "uhinet/cli/commands.hpp"

int main(int argc, char** argv) { return uhinet::cli::run(argc, argv); }
