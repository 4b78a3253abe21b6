#include "cli.hpp"

int main(int argc, char** argv) { return latact::cli::run(argc, argv); }
