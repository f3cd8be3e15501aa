#pragma once

// Synthetic data set on disk: two embedding files, a norm CSV, a miniature
// WordNet database, an IC table and a frequency table.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace normprobe::testing {

struct FixturePaths {
  std::filesystem::path root;
  std::filesystem::path embedding_a;  // plain text
  std::filesystem::path embedding_b;  // header text
  std::filesystem::path norms;
  std::filesystem::path wordnet;
  std::filesystem::path ic;
  std::filesystem::path frequencies;
  std::vector<std::string> concepts;  // clean concepts, 4 groups of 10
};

/// Concepts fall into four groups; each group has its own features and
/// embedding centre. Also adds a parenthesized name, a multiword name and a
/// concept without vectors so the alignment policy has work to do.
FixturePaths write_fixture(const std::filesystem::path& root, std::uint64_t seed = 7);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace normprobe::testing
