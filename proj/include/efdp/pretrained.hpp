#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace efdp {

// Frozen word vectors (word2vec/fastText text format). Absent words map to
// the unknown vector: the file's "<unk>" entry when present, zeros otherwise.
class PretrainedTable {
 public:
  PretrainedTable() = default;
  explicit PretrainedTable(std::size_t dim) : dim_(dim), unknown_(dim, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }

  // First occurrence wins on duplicate words.
  void insert(const std::string& word, std::vector<double> vec);
  bool contains(std::string_view word) const;

  // Exact form, then lowercased form, then the unknown vector.
  std::span<const double> lookup(std::string_view form) const;
  bool covers(std::string_view form) const;
  std::span<const double> unknown() const noexcept { return unknown_; }

  // |vocabulary ∩ table| / |vocabulary| over distinct entries, exact match.
  double coverage(const std::vector<std::string>& vocabulary) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<double> unknown_;
};

// Accepts an optional "<count> <dim>" header line. Throws ParseError on a
// dimension mismatch (with the line number) and DataError on empty input.
PretrainedTable read_pretrained(std::istream& in);
PretrainedTable load_pretrained(const std::string& path);

}  // namespace efdp
