#include "efdp/pretrained.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "efdp/error.hpp"
#include "efdp/utf8.hpp"

namespace efdp {

void PretrainedTable::insert(const std::string& word, std::vector<double> vec) {
  if (vec.size() != dim_)
    throw DataError("pretrained vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                    ", table has " + std::to_string(dim_));
  if (word == "<unk>") unknown_ = vec;
  vectors_.emplace(word, std::move(vec));
}

bool PretrainedTable::contains(std::string_view word) const { return vectors_.contains(std::string(word)); }

std::span<const double> PretrainedTable::lookup(std::string_view form) const {
  if (auto it = vectors_.find(std::string(form)); it != vectors_.end()) return it->second;
  if (auto it = vectors_.find(utf8::to_lower(form)); it != vectors_.end()) return it->second;
  return unknown_;
}

bool PretrainedTable::covers(std::string_view form) const {
  return contains(form) || contains(utf8::to_lower(form));
}

double PretrainedTable::coverage(const std::vector<std::string>& vocabulary) const {
  std::unordered_set<std::string> distinct(vocabulary.begin(), vocabulary.end());
  if (distinct.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& w : distinct) hit += contains(w);
  return static_cast<double>(hit) / static_cast<double>(distinct.size());
}

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto start = line.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(start, end - start));
    pos = end;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool is_count(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

}  // namespace

PretrainedTable read_pretrained(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_dim = false;
  PretrainedTable table;
  while (std::getline(in, line)) {
    ++line_no;
    auto f = fields(line);
    if (f.empty()) continue;
    if (line_no == 1 && f.size() == 2 && is_count(f[0]) && is_count(f[1])) {
      dim = std::stoull(std::string(f[1]));
      have_dim = true;
      table = PretrainedTable(dim);
      continue;
    }
    if (f.size() < 2) throw ParseError(line_no, "pretrained line has no vector values");
    const std::size_t d = f.size() - 1;
    if (!have_dim) {
      dim = d;
      have_dim = true;
      table = PretrainedTable(dim);
    }
    if (d != dim)
      throw ParseError(line_no, "vector dimension " + std::to_string(d) + " differs from " + std::to_string(dim));
    std::vector<double> vec(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!parse_double(f[k + 1], vec[k])) throw ParseError(line_no, "bad number '" + std::string(f[k + 1]) + "'");
    }
    table.insert(std::string(f[0]), std::move(vec));
  }
  if (table.size() == 0) throw DataError("pretrained embedding file contains no vectors");
  return table;
}

PretrainedTable load_pretrained(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pretrained embeddings " + path);
  return read_pretrained(in);
}

}  // namespace efdp
