#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace efdp {

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string pos;
  int head = 0;  // 0 = artificial root
  std::string deprel;
  // Passed through unchanged on write.
  std::string lemma = "_";
  std::string cpos = "_";
  std::string feats = "_";

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TreebankSplit {
  std::vector<Sentence> train;
  std::vector<Sentence> test;
};

// Predicted (head, relation) for one token; overrides the gold columns on write.
struct HeadLabel {
  int head = 0;
  std::string deprel;
  friend bool operator==(const HeadLabel&, const HeadLabel&) = default;
};

enum class ConllMode {
  gold,  // HEAD and DEPREL are read and validated as a tree
  raw,   // HEAD and DEPREL are ignored (head 0, empty relation)
  loose, // HEAD and DEPREL are read but not checked to form a tree
};

// Reads CoNLL-X (10 tab-separated columns, blank-line separated sentences).
// Throws ParseError for malformed lines and, in gold mode, ValidationError
// for sentences that are not single-rooted trees.
std::vector<Sentence> parse_conll(std::string_view text, ConllMode mode = ConllMode::gold);
std::vector<Sentence> read_conll_file(const std::string& path, ConllMode mode = ConllMode::gold);

// Writes CoNLL-X. When `predicted` is given it must align with `sentences`
// token for token; its heads and labels replace the gold columns.
std::string write_conll(const std::vector<Sentence>& sentences,
                        const std::vector<std::vector<HeadLabel>>* predicted = nullptr);
void write_conll_file(const std::string& path, const std::vector<Sentence>& sentences,
                      const std::vector<std::vector<HeadLabel>>* predicted = nullptr);

// Throws ValidationError unless heads form a tree rooted at a single token.
void validate_tree(const Sentence& s, std::size_t sentence_number = 0);
bool is_tree(const std::vector<int>& heads);

// True iff no two arcs cross. Arcs from the artificial root (position 0)
// are included, so a projective tree is exactly one the easy-first
// transition system can build.
bool is_projective(const Sentence& s);
bool is_projective(const std::vector<int>& heads);

TreebankSplit split_train_test(const std::vector<Sentence>& sentences, std::size_t test_size);

}  // namespace efdp
