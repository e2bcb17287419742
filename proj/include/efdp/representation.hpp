#pragma once

#include <memory>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "efdp/conll.hpp"
#include "efdp/layers.hpp"
#include "efdp/pretrained.hpp"
#include "efdp/vocab.hpp"

namespace efdp {

struct RepresentationConfig {
  std::size_t word_dim = 100;
  std::size_t pos_dim = 25;
  std::size_t char_dim = 100;
  std::size_t char_hidden = 100;  // per direction
  std::size_t char_layers = 2;
  std::size_t vprime_dim = 150;
  std::size_t lstm_hidden = 125;  // sentence BiLSTM, per direction
  std::size_t lstm_layers = 2;
  bool use_char = true;
  bool use_pretrained = false;
  bool word_dropout = true;
  double dropout_alpha = 0.25;

  friend bool operator==(const RepresentationConfig&, const RepresentationConfig&) = default;
};

// Builds contextual word vectors:
//   v'_i = tanh(W [word_i | pos_i | char_i | pretrained_i] + b)
// with inactive blocks left out, then v_i = BiLSTM(v'_1..v'_n)_i.
class Representation {
 public:
  Representation(ParameterStore& store, const Vocab& vocab, const RepresentationConfig& config,
                 std::shared_ptr<const PretrainedTable> pretrained, std::mt19937_64& rng);

  const RepresentationConfig& config() const noexcept { return config_; }
  std::size_t output_dim() const noexcept { return sentence_net_.output_dim(); }
  std::size_t projection_input_dim() const noexcept;

  // Word ids for a sentence. With a generator and word dropout enabled, each
  // word is replaced by UNK with probability alpha / (alpha + freq(w)).
  std::vector<int> word_ids(const Sentence& s, std::mt19937_64* dropout_rng) const;

  // Final forward state of the top layer concatenated with the final
  // backward state (2 * char_hidden values). Unseen characters use UNK.
  Tensor char_compose(Tape& tape, std::string_view word) const;

  // v' for one token; `word_id` is the (possibly dropped-out) vocabulary id.
  Tensor word_vector(Tape& tape, const Token& token, int word_id) const;
  Tensor word_vector(Tape& tape, const Token& token) const;

  // Contextual vectors v_i, one per token.
  std::vector<Tensor> encode_sentence(Tape& tape, const Sentence& s, std::span<const int> word_ids) const;
  std::vector<Tensor> encode_sentence(Tape& tape, const Sentence& s) const;

  Parameter& char_embeddings() const { return *char_embed_; }

 private:
  const Vocab* vocab_;
  RepresentationConfig config_;
  std::shared_ptr<const PretrainedTable> pretrained_;
  Parameter* word_embed_ = nullptr;
  Parameter* pos_embed_ = nullptr;
  Parameter* char_embed_ = nullptr;
  BiLstm char_net_;
  Parameter* proj_w_ = nullptr;
  Parameter* proj_b_ = nullptr;
  BiLstm sentence_net_;
};

}  // namespace efdp
