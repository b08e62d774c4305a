#include <iostream>

#include "hodgekit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const hodgekit::CommandResult result = hodgekit::execute_command(args);
  std::cout << result.output;
  std::cerr << result.diagnostics;
  return result.exit_code();
}
