#include "cli.hpp"

int main(int argc, char** argv) { return lmoment::cli::run(argc, argv); }
