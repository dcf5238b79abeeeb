#include "embclf_cli/cli.hpp"

int main(int argc, char** argv) { return embclf::cli::cli_dispatch(argc, argv); }
