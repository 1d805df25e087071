#include <iostream>

#include "hfm/cli.hpp"

int main(int argc, char** argv) {
  return hfm::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
