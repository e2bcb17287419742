#include "efdp/vocab.hpp"

#include <map>
#include <sstream>

#include "efdp/error.hpp"
#include "efdp/utf8.hpp"

namespace efdp {

int Index::add(const std::string& key) {
  auto [it, inserted] = ids_.emplace(key, static_cast<int>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

int Index::find(std::string_view key) const noexcept {
  auto it = ids_.find(std::string(key));
  return it == ids_.end() ? -1 : it->second;
}

namespace {
const std::string kPadToken = "<pad>";
const std::string kUnkToken = "<unk>";

void add_reserved(Index& idx) {
  idx.add(kPadToken);
  idx.add(kUnkToken);
}
}  // namespace

Vocab::Vocab() {
  add_reserved(words_);
  add_reserved(pos_);
  add_reserved(chars_);
  word_freq_ = {0, 0};
}

Vocab Vocab::build(const std::vector<Sentence>& train, std::size_t min_word_freq) {
  if (train.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
  Vocab v;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> freq;
  std::map<std::string, std::size_t> root_labels;
  for (const auto& s : train) {
    for (const auto& t : s.tokens) {
      if (freq[t.form]++ == 0) order.push_back(t.form);
      v.pos_.add(t.pos);
      for (const auto& ch : utf8::characters(t.form)) v.chars_.add(ch);
      v.relations_.add(t.deprel);
      if (t.head == 0) ++root_labels[t.deprel];
    }
  }
  for (const auto& w : order) {
    if (freq[w] >= min_word_freq) {
      v.words_.add(w);
      v.word_freq_.push_back(freq[w]);
    }
  }
  // Most frequent label on root arcs; std::map iteration breaks ties by name.
  std::size_t best = 0;
  for (const auto& [label, count] : root_labels) {
    if (count > best) {
      best = count;
      v.root_label_ = label;
    }
  }
  return v;
}

int Vocab::word_id(std::string_view form) const noexcept {
  int id = words_.find(form);
  return id < 0 ? kUnk : id;
}

int Vocab::pos_id(std::string_view pos) const noexcept {
  int id = pos_.find(pos);
  return id < 0 ? kUnk : id;
}

int Vocab::char_id(std::string_view ch) const noexcept {
  int id = chars_.find(ch);
  return id < 0 ? kUnk : id;
}

int Vocab::relation_id(std::string_view rel) const noexcept { return relations_.find(rel); }

std::size_t Vocab::word_freq(int id) const noexcept {
  return id >= 0 && static_cast<std::size_t>(id) < word_freq_.size() ? word_freq_[static_cast<std::size_t>(id)] : 0;
}

std::string Vocab::to_text() const {
  std::ostringstream out;
  out << "root\t" << root_label_ << '\n';
  for (std::size_t i = 2; i < words_.size(); ++i) out << "word\t" << words_.keys()[i] << '\t' << word_freq_[i] << '\n';
  for (std::size_t i = 2; i < pos_.size(); ++i) out << "pos\t" << pos_.keys()[i] << '\n';
  for (std::size_t i = 2; i < chars_.size(); ++i) out << "char\t" << chars_.keys()[i] << '\n';
  for (const auto& r : relations_.keys()) out << "rel\t" << r << '\n';
  return out.str();
}

Vocab Vocab::from_text(std::string_view text) {
  Vocab v;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError("vocabulary line " + std::to_string(line_no) + " has no tab");
    std::string_view kind = line.substr(0, tab);
    std::string rest(line.substr(tab + 1));
    if (kind == "root") {
      v.root_label_ = rest;
    } else if (kind == "word") {
      auto t2 = rest.rfind('\t');
      if (t2 == std::string::npos) throw FormatError("vocabulary line " + std::to_string(line_no) + ": missing frequency");
      v.words_.add(rest.substr(0, t2));
      v.word_freq_.push_back(std::stoull(rest.substr(t2 + 1)));
    } else if (kind == "pos") {
      v.pos_.add(rest);
    } else if (kind == "char") {
      v.chars_.add(rest);
    } else if (kind == "rel") {
      v.relations_.add(rest);
    } else {
      throw FormatError("vocabulary line " + std::to_string(line_no) + ": unknown kind '" + std::string(kind) + "'");
    }
  }
  return v;
}

bool operator==(const Vocab& a, const Vocab& b) {
  return a.words_.keys() == b.words_.keys() && a.pos_.keys() == b.pos_.keys() &&
         a.chars_.keys() == b.chars_.keys() && a.relations_.keys() == b.relations_.keys() &&
         a.word_freq_ == b.word_freq_ && a.root_label_ == b.root_label_;
}

}  // namespace efdp
