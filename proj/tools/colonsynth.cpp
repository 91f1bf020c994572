#include "colonsynth/cli.hpp"

int main(int argc, char** argv) { return colonsynth::cli::run_cli(argc, argv); }
