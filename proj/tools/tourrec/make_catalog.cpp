// Writes the synthetic place catalog shipped as data/iraq_places.csv.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "tourrec/data_model.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: tourrec_catalog <out.csv> [count=232] [seed=2024]\n";
    return 2;
  }
  std::size_t count = argc > 2 ? std::stoul(argv[2]) : 232;
  std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 2024;
  std::ofstream out(argv[1], std::ios::binary);
  if (!out) {
    std::cerr << "tourrec_catalog: cannot write " << argv[1] << '\n';
    return 1;
  }
  tourrec::write_places(out, tourrec::synthesize_catalog(count, seed));
  return 0;
}
