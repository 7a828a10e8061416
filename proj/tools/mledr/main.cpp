#include <iostream>

#include "mledr/app.hpp"

int main(int argc, char** argv) {
  return mledr::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
