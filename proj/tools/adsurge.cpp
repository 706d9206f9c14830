#include "adsurge/cli.hpp"

int main(int argc, char** argv) { return adsurge::cli::run(argc, argv); }
