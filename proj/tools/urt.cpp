#include "urt/cli.hpp"

int main(int argc, char** argv) { return urt::cli::run(argc, argv); }
