#include "condclt/config.hpp"

int main(int argc, char** argv) { return condclt::cli_main(argc, argv); }
