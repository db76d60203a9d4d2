#include "latent/cli/commands.hpp"

int main(int argc, char** argv) { return latent::cli::run(argc, argv); }
