#pragma once

// Test-only generators: random projective trees and a small toy grammar.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "efdp/conll.hpp"

namespace efdp::testing {

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

namespace detail {
// Builds a random projective subtree spanning [lo, hi]; returns its root.
inline int build_span(int lo, int hi, std::vector<int>& heads, std::mt19937_64& rng) {
  const int root = uniform_int(rng, lo, hi);
  auto attach_segments = [&](int a, int b) {
    // Split [a, b] into consecutive segments, each a child subtree of root.
    int start = a;
    while (start <= b) {
      const int end = uniform_int(rng, start, b);
      heads[static_cast<std::size_t>(build_span(start, end, heads, rng) - 1)] = root;
      start = end + 1;
    }
  };
  attach_segments(lo, root - 1);
  attach_segments(root + 1, hi);
  return root;
}
}  // namespace detail

// Heads (1-based tokens, 0 = root) of a uniformly structured random
// projective tree. Every projective tree has nonzero probability.
inline std::vector<int> random_projective_heads(int n, std::mt19937_64& rng) {
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  const int root = detail::build_span(1, n, heads, rng);
  heads[static_cast<std::size_t>(root - 1)] = 0;
  return heads;
}

// Arbitrary (usually non-projective) random tree.
inline std::vector<int> random_tree_heads(int n, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 1; k < order.size(); ++k)
    heads[static_cast<std::size_t>(order[k] - 1)] = order[static_cast<std::size_t>(uniform_int(rng, 0, int(k) - 1))];
  return heads;
}

inline Sentence sentence_from_heads(const std::vector<int>& heads, const std::vector<std::string>& rels,
                                    const std::vector<std::string>& forms = {}) {
  Sentence s;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i) + 1;
    t.form = forms.empty() ? "w" + std::to_string(i % 7) : forms[i];
    t.pos = "P" + std::to_string(i % 3);
    t.head = heads[i];
    t.deprel = rels[i];
    s.tokens.push_back(t);
  }
  return s;
}

// Random projective sentence with labels drawn from `relation_count` names.
inline Sentence random_sentence(int n, int relation_count, std::mt19937_64& rng) {
  auto heads = random_projective_heads(n, rng);
  std::vector<std::string> rels, forms;
  for (int i = 0; i < n; ++i) {
    rels.push_back(heads[static_cast<std::size_t>(i)] == 0 ? "root"
                                                           : "r" + std::to_string(uniform_int(rng, 0, relation_count - 1)));
    forms.push_back("w" + std::to_string(uniform_int(rng, 0, 19)));
  }
  auto s = sentence_from_heads(heads, rels, forms);
  for (auto& t : s.tokens) t.pos = "P" + std::to_string(uniform_int(rng, 0, 4));
  return s;
}

// "Tôi có một con mèo" with its gold tree (heads 2,0,5,5,2).
inline Sentence worked_example_sentence() {
  return sentence_from_heads({2, 0, 5, 5, 2}, {"nsubj", "root", "det", "nmod", "dobj"},
                             {"Tôi", "có", "một", "con", "mèo"});
}

// Toy grammar over a 30-word vocabulary:
//   S  -> NP V [NP] [Prep NP]
//   NP -> Pron | [Det] N [Adj]
class ToyGrammar {
 public:
  explicit ToyGrammar(std::uint64_t seed) : rng_(seed) {}

  Sentence sentence() {
    words_.clear();
    const int subj = noun_phrase();
    const int verb = push(pick(verbs_), "V", 0, "root");
    set_head(subj, verb, "nsubj");
    if (coin(0.7)) set_head(noun_phrase(), verb, "dobj");
    if (coin(0.35)) {
      const int prep = push(pick(preps_), "E", verb, "prep");
      set_head(noun_phrase(), prep, "pobj");
    }
    Sentence s;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      words_[i].index = static_cast<int>(i) + 1;
      s.tokens.push_back(words_[i]);
    }
    return s;
  }

  std::vector<Sentence> corpus(std::size_t n) {
    std::vector<Sentence> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(sentence());
    return out;
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(v.size()) - 1))];
  }
  int push(const std::string& form, const std::string& pos, int head, const std::string& rel) {
    Token t;
    t.form = form;
    t.pos = pos;
    t.head = head;
    t.deprel = rel;
    words_.push_back(t);
    return static_cast<int>(words_.size());
  }
  void set_head(int token, int head, const std::string& rel) {
    words_[static_cast<std::size_t>(token - 1)].head = head;
    words_[static_cast<std::size_t>(token - 1)].deprel = rel;
  }
  // Returns the phrase head; its head/relation are set by the caller.
  int noun_phrase() {
    if (coin(0.25)) return push(pick(pronouns_), "P", 0, "");
    int det = coin(0.5) ? push(pick(dets_), "L", 0, "det") : 0;
    const int noun = push(pick(nouns_), "N", 0, "");
    if (det) set_head(det, noun, "det");
    if (coin(0.4)) push(pick(adjs_), "A", noun, "amod");
    return noun;
  }

  std::mt19937_64 rng_;
  std::vector<Token> words_;
  std::vector<std::string> nouns_ = {"mèo", "chó", "nhà", "sách", "bàn", "cá", "trường", "thư_viện", "cây", "xe"};
  std::vector<std::string> verbs_ = {"có", "thấy", "đọc", "mua", "ăn", "đi"};
  std::vector<std::string> adjs_ = {"đẹp", "lớn", "nhỏ", "mới", "cũ"};
  std::vector<std::string> dets_ = {"một", "những", "các", "mỗi"};
  std::vector<std::string> preps_ = {"ở", "trong", "với"};
  std::vector<std::string> pronouns_ = {"Tôi", "nó"};
};

}  // namespace efdp::testing
