#include <iostream>
#include <string>
#include <vector>

#include <suita/cli.hpp>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return suita::cli::run(args, std::cout);
}
