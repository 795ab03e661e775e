#include <string>
#include <vector>

#include "pertlag/cli.hpp"

int main(int argc, char** argv) { return pertlag::cli::run(std::vector<std::string>(argv + 1, argv + argc)); }
