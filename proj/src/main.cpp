#include <vector>

#include "fauio/cli.hpp"

int main(int argc, char** argv) {
  return fauio::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
