#include <string>
#include <vector>

#include "bribery/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bribery::cli::run(args);
}
