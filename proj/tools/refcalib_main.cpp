#include "refcalib/cli.hpp"

int main(int argc, char** argv) { return refcalib::cli_main(argc, argv); }
