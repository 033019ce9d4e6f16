#include <ssea/cli.hpp>

int main(int argc, char** argv) { return ssea::cli::dispatch_main(argc, argv); }
