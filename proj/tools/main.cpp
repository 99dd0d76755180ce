#include "zddb/cli.hpp"

int main(int argc, char** argv) { return zddb::cli_dispatch(argc, argv); }
