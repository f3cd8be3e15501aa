#include "fixture.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <random>

namespace normprobe::testing {

namespace fs = std::filesystem;

namespace {

const char* kGroups[] = {"animal", "tool", "food", "plant"};
const char* kSuffix[] = {"ab", "ce", "di", "fo", "gu", "ha", "ki", "lo", "me", "nu"};

std::string offset(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08d", n);
  return buf;
}

}  // namespace

fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("normprobe-test-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

FixturePaths write_fixture(const fs::path& root, std::uint64_t seed) {
  FixturePaths p;
  p.root = root;
  fs::create_directories(root / "wordnet");
  p.embedding_a = root / "rep_a.txt";
  p.embedding_b = root / "rep_b.vec";
  p.norms = root / "norms.csv";
  p.wordnet = root / "wordnet";
  p.ic = root / "ic.txt";
  p.frequencies = root / "freq.txt";

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int dim = 6;

  std::vector<std::vector<double>> centres(4, std::vector<double>(dim));
  for (int g = 0; g < 4; ++g)
    for (int d = 0; d < dim; ++d) centres[g][d] = 3.0 * noise(rng);

  for (int g = 0; g < 4; ++g)
    for (const char* s : kSuffix) p.concepts.push_back(std::string(kGroups[g]) + s);

  std::ofstream a(p.embedding_a), b(p.embedding_b);
  b << p.concepts.size() + 2 << ' ' << dim << '\n';
  for (std::size_t i = 0; i < p.concepts.size(); ++i) {
    const auto& c = centres[i / 10];
    a << p.concepts[i];
    b << p.concepts[i];
    for (int d = 0; d < dim; ++d) {
      a << ' ' << c[d] + noise(rng);
      b << ' ' << 0.5 * c[d] + 1.5 * noise(rng);
    }
    a << '\n';
    b << '\n';
  }
  for (const char* extra : {"bat_(animal)", "ice_cream"}) {
    a << extra;
    b << extra;
    for (int d = 0; d < dim; ++d) {
      a << ' ' << noise(rng);
      b << ' ' << noise(rng);
    }
    a << '\n';
    b << '\n';
  }

  // Group features, in perceptual and non-perceptual categories, plus one
  // feature too rare to keep.
  const char* categories[] = {"visual-perceptual", "functional", "taxonomic", "other-perceptual", "encyclopaedic"};
  std::ofstream norms(p.norms);
  norms << "concept,feature,category,count\n";
  for (int g = 0; g < 4; ++g) {
    for (int f = 0; f < 5; ++f) {
      const std::string feature = std::string("has_") + kGroups[g] + "_trait_" + std::to_string(f);
      for (int i = 0; i < 10; ++i) {
        const bool positive = i < 6 || unit(rng) < 0.3;
        if (positive) norms << kGroups[g] << kSuffix[i] << ',' << feature << ',' << categories[f] << ','
                            << 1 + static_cast<int>(unit(rng) * 20) << '\n';
      }
    }
  }
  for (std::size_t i = 0; i < p.concepts.size(); ++i)
    norms << p.concepts[i] << ",is_" << kGroups[i / 10] << ",taxonomic," << 10 + i % 7 << '\n';
  // Shared feature spanning two groups, and noise features across everything.
  for (int i = 0; i < 20; ++i)
    norms << p.concepts[i] << ",is_alive,taxonomic," << 5 + i << '\n';
  for (std::size_t i = 0; i < p.concepts.size(); ++i)
    if (unit(rng) < 0.3) norms << p.concepts[i] << ",\"is big, heavy\",visual-perceptual,3\n";
  norms << "animalab,is_rare,functional,2\nanimalce,is_rare,functional,2\n";
  norms << "bat_(animal),has_animal_trait_0,visual-perceptual,4\n";
  norms << "ice_cream,has_food_trait_0,visual-perceptual,4\n";
  norms << "ghostword,has_plant_trait_0,visual-perceptual,4\n";

  // WordNet: root <- four group synsets <- one synset per concept. The first
  // concept of each group also gets a second sense under a neighbouring group.
  std::ofstream data(p.wordnet / "data.noun"), index(p.wordnet / "index.noun"), ic(p.ic), freq(p.frequencies);
  data << "  1 This software and database is being provided\n";
  index << "  1 This software and database is being provided\n";
  const int root_offset = 100;
  data << offset(root_offset) << " 03 n 01 entity 0 000 | root\n";
  ic << root_offset << "n 0.5\n";
  for (int g = 0; g < 4; ++g) {
    const int off = 200 + g * 100;
    data << offset(off) << " 03 n 01 " << kGroups[g] << " 0 001 @ " << offset(root_offset) << " n 0000 | group\n";
    ic << off << "n " << 2.0 + 0.5 * g << '\n';
  }
  for (std::size_t i = 0; i < p.concepts.size(); ++i) {
    const int g = static_cast<int>(i / 10);
    const int off = 1000 + static_cast<int>(i) * 10;
    data << offset(off) << " 05 n 01 " << p.concepts[i] << " 0 001 @ " << offset(200 + g * 100)
         << " n 0000 | leaf\n";
    ic << off << "n " << 6.0 + unit(rng) * 4 << '\n';
  }
  for (int g = 0; g < 4; ++g) {
    const int off = 5000 + g * 10;
    data << offset(off) << " 05 n 01 " << kGroups[g] << kSuffix[0] << " 1 001 @ " << offset(200 + ((g + 1) % 4) * 100)
         << " n 0000 | second sense\n";
    ic << off << "n " << 7.0 << '\n';
  }
  for (std::size_t i = 0; i < p.concepts.size(); ++i) {
    const int off = 1000 + static_cast<int>(i) * 10;
    const bool two = i % 10 == 0;
    index << p.concepts[i] << " n " << (two ? 2 : 1) << " 1 @ " << (two ? 2 : 1) << " 0 " << offset(off);
    if (two) index << ' ' << offset(5000 + static_cast<int>(i / 10) * 10);
    index << '\n';
    freq << p.concepts[i] << ' ' << 10 + static_cast<int>(unit(rng) * 5000) << '\n';
  }
  return p;
}

}  // namespace normprobe::testing
