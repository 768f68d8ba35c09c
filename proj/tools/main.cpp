#include "gasket/cli.hpp"

int main(int argc, char** argv) {
  return gasket::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
