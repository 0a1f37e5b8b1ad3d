#include "cli_app.hpp"

int main(int argc, char** argv) { return robustam::cli::run(argc, argv); }
