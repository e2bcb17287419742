#include "efdp/conll.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "efdp/error.hpp"

namespace efdp {
namespace {

constexpr std::size_t kColumns = 10;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Token parse_line(std::string_view line, std::size_t line_no, ConllMode mode) {
  if (!line.empty() && line.front() == '#')
    throw ParseError(line_no, "comment lines are not CoNLL-X (CoNLL-U input is not supported)");
  auto cols = split_tabs(line);
  if (cols.size() != kColumns)
    throw ParseError(line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
  if (cols[0].find_first_of("-.") != std::string_view::npos)
    throw ParseError(line_no, "multiword or empty-node ID '" + std::string(cols[0]) +
                                  "' (CoNLL-U input is not supported)");
  auto id = to_int(cols[0]);
  if (!id || *id < 1) throw ParseError(line_no, "ID is not a positive integer: '" + std::string(cols[0]) + "'");
  Token t;
  if (mode != ConllMode::raw) {
    auto head = to_int(cols[6]);
    if (!head || *head < 0)
      throw ParseError(line_no, "HEAD is not a non-negative integer: '" + std::string(cols[6]) + "'");
    t.head = *head;
    t.deprel = std::string(cols[7]);
  }
  t.index = *id;
  t.form = std::string(cols[1]);
  t.lemma = std::string(cols[2]);
  t.cpos = std::string(cols[3]);
  t.pos = std::string(cols[4] == "_" ? cols[3] : cols[4]);
  t.feats = std::string(cols[5]);
  if (t.form.empty()) throw ParseError(line_no, "empty FORM");
  if (t.pos.empty() || t.pos == "_") throw ParseError(line_no, "missing POS and CPOS");
  return t;
}

}  // namespace

bool is_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int h : heads) {
    if (h < 0 || h > n) return false;
    if (h == 0) ++roots;
  }
  if (roots != 1) return false;
  // Every token must reach the root without revisiting a node.
  std::vector<int> state(n + 1, 0);  // 0 unseen, 1 on path, 2 reaches root
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = heads[cur - 1];
    }
    if (state[cur] == 1) return false;
    for (int p : path) state[p] = 2;
  }
  return true;
}

void validate_tree(const Sentence& s, std::size_t sentence_number) {
  auto where = [&] {
    std::string w = "sentence " + std::to_string(sentence_number);
    if (!s.tokens.empty()) w += " (starting '" + s.tokens.front().form + "')";
    return w;
  };
  std::vector<int> heads;
  heads.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Token& t = s.tokens[i];
    if (t.index != static_cast<int>(i) + 1)
      throw ValidationError(where() + ": token IDs are not consecutive from 1");
    if (t.head == t.index) throw ValidationError(where() + ": token " + std::to_string(t.index) + " is its own head");
    if (t.head > static_cast<int>(s.size()))
      throw ValidationError(where() + ": head " + std::to_string(t.head) + " out of range");
    heads.push_back(t.head);
  }
  int roots = 0;
  for (int h : heads) roots += h == 0;
  if (roots != 1) throw ValidationError(where() + ": " + std::to_string(roots) + " root tokens, expected 1");
  if (!is_tree(heads)) throw ValidationError(where() + ": heads contain a cycle");
}

std::vector<Sentence> parse_conll(std::string_view text, ConllMode mode) {
  std::vector<Sentence> out;
  Sentence current;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    if (mode == ConllMode::gold) {
      validate_tree(current, out.size() + 1);
    } else {
      for (std::size_t i = 0; i < current.size(); ++i)
        if (current.tokens[i].index != static_cast<int>(i) + 1)
          throw ValidationError("sentence " + std::to_string(out.size() + 1) + ": token IDs are not consecutive from 1");
    }
    out.push_back(std::move(current));
    current = Sentence{};
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      flush();
    } else {
      current.tokens.push_back(parse_line(line, line_no, mode));
    }
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  flush();
  return out;
}

std::vector<Sentence> read_conll_file(const std::string& path, ConllMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_conll(ss.str(), mode);
}

std::string write_conll(const std::vector<Sentence>& sentences,
                        const std::vector<std::vector<HeadLabel>>* predicted) {
  if (predicted && predicted->size() != sentences.size())
    throw DataError("write_conll: " + std::to_string(predicted->size()) + " predictions for " +
                    std::to_string(sentences.size()) + " sentences");
  std::string out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sent = sentences[s];
    if (predicted && (*predicted)[s].size() != sent.size())
      throw DataError("write_conll: sentence " + std::to_string(s + 1) + " has " + std::to_string(sent.size()) +
                      " tokens but " + std::to_string((*predicted)[s].size()) + " predictions");
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const Token& t = sent.tokens[i];
      int head = predicted ? (*predicted)[s][i].head : t.head;
      const std::string& rel = predicted ? (*predicted)[s][i].deprel : t.deprel;
      out += std::to_string(t.index);
      out += '\t';
      out += t.form;
      out += '\t';
      out += t.lemma.empty() ? "_" : t.lemma;
      out += '\t';
      out += t.cpos.empty() ? "_" : t.cpos;
      out += '\t';
      out += t.pos;
      out += '\t';
      out += t.feats.empty() ? "_" : t.feats;
      out += '\t';
      out += std::to_string(head);
      out += '\t';
      out += rel.empty() ? "_" : rel;
      out += "\t_\t_\n";
    }
    out += '\n';
  }
  return out;
}

void write_conll_file(const std::string& path, const std::vector<Sentence>& sentences,
                      const std::vector<std::vector<HeadLabel>>* predicted) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << write_conll(sentences, predicted);
}

bool is_projective(const std::vector<int>& heads) {
  // Sort-free O(n^2): an arc (a,b) crosses (c,d) iff exactly one of c,d lies
  // strictly inside (a,b) and the other strictly outside [a,b].
  const int n = static_cast<int>(heads.size());
  for (int d1 = 1; d1 <= n; ++d1) {
    int lo1 = std::min(d1, heads[d1 - 1]), hi1 = std::max(d1, heads[d1 - 1]);
    for (int d2 = d1 + 1; d2 <= n; ++d2) {
      int lo2 = std::min(d2, heads[d2 - 1]), hi2 = std::max(d2, heads[d2 - 1]);
      if ((lo1 < lo2 && lo2 < hi1 && hi1 < hi2) || (lo2 < lo1 && lo1 < hi2 && hi2 < hi1)) return false;
    }
  }
  return true;
}

bool is_projective(const Sentence& s) {
  std::vector<int> heads;
  heads.reserve(s.size());
  for (const auto& t : s.tokens) heads.push_back(t.head);
  return is_projective(heads);
}

TreebankSplit split_train_test(const std::vector<Sentence>& sentences, std::size_t test_size) {
  if (test_size > sentences.size())
    throw ConfigError("test size " + std::to_string(test_size) + " exceeds corpus size " +
                      std::to_string(sentences.size()));
  TreebankSplit split;
  auto cut = sentences.begin() + static_cast<std::ptrdiff_t>(sentences.size() - test_size);
  split.train.assign(sentences.begin(), cut);
  split.test.assign(cut, sentences.end());
  return split;
}

}  // namespace efdp
