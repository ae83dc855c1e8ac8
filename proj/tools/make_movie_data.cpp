// Writes a synthetic movie domain as modes/facts/pos/neg files for lrbm-boost.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "lrbm/parser.hpp"
#include "lrbm/synthetic.hpp"

namespace {

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(2);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make-movie-data <output-prefix> [seed]\n";
    return 1;
  }
  const std::string prefix = argv[1];
  lrbm::MovieDomainConfig config;
  if (argc == 3) config.seed = std::stoull(argv[2]);
  const auto dom = lrbm::make_movie_domain(config);
  write(prefix + ".modes", dom.modes_text);
  write(prefix + ".facts", lrbm::serialize_facts(dom.kb));
  write(prefix + ".pos", lrbm::serialize_atoms(dom.examples.positives));
  write(prefix + ".neg", lrbm::serialize_atoms(dom.examples.negatives));
  std::cout << "wrote " << prefix << ".{modes,facts,pos,neg}: " << dom.kb.size() << " facts, "
            << dom.examples.positives.size() << " positives, " << dom.examples.negatives.size() << " negatives\n";
  return 0;
}
