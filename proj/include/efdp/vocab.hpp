#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "efdp/conll.hpp"

namespace efdp {

// String <-> dense id map. Ids are assigned in first-seen order.
class Index {
 public:
  int add(const std::string& key);
  int find(std::string_view key) const noexcept;  // -1 when absent
  const std::string& key(int id) const { return keys_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return keys_.size(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, int> ids_;
};

// Word, POS, character and relation vocabularies built from training data.
// Word/POS/char maps reserve id 0 for padding and id 1 for unknown entries.
// Relations carry no reserved ids, so relation_count() is the number of
// distinct labels R.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  static Vocab build(const std::vector<Sentence>& train, std::size_t min_word_freq = 1);

  int word_id(std::string_view form) const noexcept;
  int pos_id(std::string_view pos) const noexcept;
  int char_id(std::string_view ch) const noexcept;
  int relation_id(std::string_view rel) const noexcept;  // -1 when absent

  std::size_t word_count() const noexcept { return words_.size(); }
  std::size_t pos_count() const noexcept { return pos_.size(); }
  std::size_t char_count() const noexcept { return chars_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }

  const std::string& word(int id) const { return words_.key(id); }
  const std::string& relation(int id) const { return relations_.key(id); }
  const std::vector<std::string>& relations() const noexcept { return relations_.keys(); }
  // Training frequency of an in-vocabulary word id (0 for reserved ids).
  std::size_t word_freq(int id) const noexcept;

  // Label given to the arc from the artificial root.
  const std::string& root_label() const noexcept { return root_label_; }
  int root_relation() const noexcept { return relation_id(root_label_); }

  // Line-oriented text form, stored inside model files.
  std::string to_text() const;
  static Vocab from_text(std::string_view text);

  friend bool operator==(const Vocab& a, const Vocab& b);

 private:
  Vocab();
  Index words_, pos_, chars_, relations_;
  std::vector<std::size_t> word_freq_;
  std::string root_label_ = "root";
};

}  // namespace efdp
