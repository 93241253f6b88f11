#include "pdcphase/cli.hpp"

int main(int argc, char** argv) { return pdcphase::cli::dispatch(argc, argv); }
