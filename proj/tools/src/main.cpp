#include "degroot/cli.hpp"

int main(int argc, char** argv) { return degroot::cli::run(std::vector<std::string>(argv, argv + argc)); }
