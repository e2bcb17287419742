#include "efdp/representation.hpp"

#include "efdp/error.hpp"
#include "efdp/utf8.hpp"

namespace efdp {

Representation::Representation(ParameterStore& store, const Vocab& vocab, const RepresentationConfig& config,
                               std::shared_ptr<const PretrainedTable> pretrained, std::mt19937_64& rng)
    : vocab_(&vocab), config_(config), pretrained_(std::move(pretrained)) {
  if (config_.use_pretrained && !pretrained_)
    throw ConfigError("pretrained embeddings enabled but no table was loaded");
  word_embed_ = &store.add("embed/word", Shape{vocab.word_count(), config_.word_dim}, Init::embedding, rng);
  pos_embed_ = &store.add("embed/pos", Shape{vocab.pos_count(), config_.pos_dim}, Init::embedding, rng);
  if (config_.use_char) {
    char_embed_ = &store.add("embed/char", Shape{vocab.char_count(), config_.char_dim}, Init::embedding, rng);
    char_net_ = BiLstm(store, "char", config_.char_dim, config_.char_hidden, config_.char_layers, rng);
  }
  proj_w_ = &store.add("word_proj/W", Shape{config_.vprime_dim, projection_input_dim()}, Init::glorot, rng);
  proj_b_ = &store.add("word_proj/b", Shape{config_.vprime_dim, 1}, Init::zeros, rng);
  sentence_net_ = BiLstm(store, "sentence", config_.vprime_dim, config_.lstm_hidden, config_.lstm_layers, rng);
}

std::size_t Representation::projection_input_dim() const noexcept {
  std::size_t d = config_.word_dim + config_.pos_dim;
  if (config_.use_char) d += 2 * config_.char_hidden;
  if (config_.use_pretrained && pretrained_) d += pretrained_->dim();
  return d;
}

std::vector<int> Representation::word_ids(const Sentence& s, std::mt19937_64* dropout_rng) const {
  std::vector<int> ids;
  ids.reserve(s.size());
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (const auto& t : s.tokens) {
    int id = vocab_->word_id(t.form);
    if (dropout_rng && config_.word_dropout && id != Vocab::kUnk) {
      const double freq = static_cast<double>(vocab_->word_freq(id));
      if (coin(*dropout_rng) < config_.dropout_alpha / (config_.dropout_alpha + freq)) id = Vocab::kUnk;
    }
    ids.push_back(id);
  }
  return ids;
}

Tensor Representation::char_compose(Tape& tape, std::string_view word) const {
  if (!char_embed_) throw ConfigError("character composition is disabled in this model");
  auto chars = utf8::characters(word);
  if (chars.empty()) throw ShapeError("char_compose: empty word");
  Tensor table = tape.param(*char_embed_);
  std::vector<Tensor> inputs;
  inputs.reserve(chars.size());
  for (const auto& ch : chars) inputs.push_back(pick_row(table, static_cast<std::size_t>(vocab_->char_id(ch))));
  auto out = run_bilstm(char_net_, tape, inputs);
  // Top-layer outputs are [fwd | bwd]; the final forward state sits in the
  // last position, the final backward state in the first.
  const std::size_t h = config_.char_hidden;
  return concat({slice(out.back(), 0, h), slice(out.front(), h, h)});
}

Tensor Representation::word_vector(Tape& tape, const Token& token, int word_id) const {
  std::vector<Tensor> blocks;
  blocks.push_back(pick_row(tape.param(*word_embed_), static_cast<std::size_t>(word_id)));
  blocks.push_back(pick_row(tape.param(*pos_embed_), static_cast<std::size_t>(vocab_->pos_id(token.pos))));
  if (config_.use_char) blocks.push_back(char_compose(tape, token.form));
  if (config_.use_pretrained && pretrained_) {
    auto vec = pretrained_->lookup(token.form);
    blocks.push_back(tape.input(std::vector<double>(vec.begin(), vec.end())));
  }
  Tensor x = concat(blocks);
  return tanh(affine(tape.param(*proj_b_), {{tape.param(*proj_w_), x}}));
}

Tensor Representation::word_vector(Tape& tape, const Token& token) const {
  return word_vector(tape, token, vocab_->word_id(token.form));
}

std::vector<Tensor> Representation::encode_sentence(Tape& tape, const Sentence& s,
                                                    std::span<const int> word_ids) const {
  if (s.size() == 0) throw ShapeError("encode_sentence: empty sentence");
  if (word_ids.size() != s.size()) throw ShapeError("encode_sentence: word id count does not match sentence");
  std::vector<Tensor> vprime;
  vprime.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) vprime.push_back(word_vector(tape, s.tokens[i], word_ids[i]));
  return run_bilstm(sentence_net_, tape, vprime);
}

std::vector<Tensor> Representation::encode_sentence(Tape& tape, const Sentence& s) const {
  auto ids = word_ids(s, nullptr);
  return encode_sentence(tape, s, ids);
}

}  // namespace efdp
