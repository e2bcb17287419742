#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "efdp/conll.hpp"
#include "efdp/easy_first.hpp"
#include "efdp/pretrained.hpp"
#include "efdp/representation.hpp"
#include "efdp/trainer.hpp"
#include "efdp/vocab.hpp"

namespace efdp {

// Architecture settings that must match between training and parsing.
struct ModelConfig {
  RepresentationConfig repr;
  std::size_t tree_hidden = 200;
  std::size_t relation_dim = 25;
  std::size_t mlp_hidden = 100;
  std::uint64_t seed = 1;
  std::string pretrained_path;  // only used when repr.use_pretrained
  std::size_t pretrained_dim = 0;  // 0 = take the table's dimension

  // Sets one field from its text key; false for unknown keys.
  bool set(const std::string& key, const std::string& value);

  // key=value lines, stored in the model file.
  std::string to_text() const;
  static ModelConfig from_text(std::string_view text);
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// The complete parser: word representation, tree encoder and scorers over
// one parameter store.
class ParserModel : public TrainingTarget {
 public:
  ParserModel(const ModelConfig& config, Vocab vocab, std::shared_ptr<const PretrainedTable> pretrained = nullptr);
  ParserModel(const ParserModel&) = delete;
  ParserModel& operator=(const ParserModel&) = delete;

  const ModelConfig& config() const noexcept { return config_; }
  const Vocab& vocab() const noexcept { return *vocab_; }
  const Representation& representation() const noexcept { return *repr_; }
  const TreeEncoder& tree_encoder() const noexcept { return encoder_; }
  const ScoringNet& scoring_net() const noexcept { return scoring_; }
  std::size_t relation_count() const noexcept { return vocab_->relation_count(); }

  ParameterStore& parameters() override { return store_; }
  const ParameterStore& parameters() const { return store_; }
  std::vector<int> input_ids(const Sentence& s, std::mt19937_64* rng) const override;
  Episode begin(Tape& tape, const Sentence& s, std::span<const int> input_ids) override;
  std::vector<int> gold_relations(const Sentence& s) const override;

  // Greedy parse with the current parameters. Safe to call concurrently
  // from several threads while no training is running.
  ArcList parse(const Sentence& s, std::vector<TraceStep>* trace = nullptr, bool incremental = true) const;
  // Order-preserving parse of many sentences over `threads` workers
  // (0 = OpenMP default).
  std::vector<ArcList> parse_all(const std::vector<Sentence>& sentences, int threads = 0) const;

  std::vector<HeadLabel> to_head_labels(const ArcList& arcs, std::size_t n) const;

  // Model file: parameter block ("EFDP" format) followed by a metadata
  // block: "EFDM", u32 byte length, then config and vocabulary text.
  std::vector<std::uint8_t> serialize() const;
  void save(const std::string& path) const;
  static std::unique_ptr<ParserModel> deserialize(std::span<const std::uint8_t> bytes,
                                                  std::shared_ptr<const PretrainedTable> pretrained = nullptr);
  // Loads the model and, if it was trained with pretrained vectors, the
  // table from `pretrained_override` or the path recorded at training time.
  static std::unique_ptr<ParserModel> load(const std::string& path, const std::string& pretrained_override = {});

 private:
  Episode make_episode(Tape& tape, const Sentence& s, std::span<const int> input_ids) const;

  ModelConfig config_;
  std::unique_ptr<Vocab> vocab_;
  std::shared_ptr<const PretrainedTable> pretrained_;
  ParameterStore store_;
  std::unique_ptr<Representation> repr_;
  TreeEncoder encoder_;
  ScoringNet scoring_;
};

}  // namespace efdp
