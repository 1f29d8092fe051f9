#include "cli_app.hpp"

int main(int argc, char** argv) { return statedup::cli::run_cli(argc, argv); }
