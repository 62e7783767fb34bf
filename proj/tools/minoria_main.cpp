#include <string>
#include <vector>

#include "minoria/cli.hpp"

int main(int argc, char** argv) {
  return minoria::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
