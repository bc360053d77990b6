#include <string>
#include <vector>

#include "nply/cli.hpp"

int main(int argc, char** argv) {
  return nply::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
