// Usage: make_fixtures [ROOT]   (default: fixtures)

#include <iostream>

#include "fixture_builders.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : "fixtures";
  try {
    fairlicit::fixtures::write_all(root);
  } catch (const fairlicit::Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 2;
  }
  std::cout << "wrote fixtures under " << root.string() << "\n";
  return 0;
}
