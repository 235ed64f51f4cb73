#include "schrlat/cli.hpp"

int main(int argc, char** argv) { return schrlat::parse_and_dispatch(argc, argv); }
