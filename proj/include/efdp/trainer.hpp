#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "efdp/conll.hpp"
#include "efdp/easy_first.hpp"
#include "efdp/oracle.hpp"
#include "efdp/params.hpp"

namespace efdp {

// A parse in progress: transition state plus the scorer (and encoder, for
// neural models) that drive it.
struct Episode {
  ParseState state;
  std::unique_ptr<ActionScorer> scorer;
  const TreeEncoder* encoder = nullptr;
};

// What the trainer needs from a model.
class TrainingTarget {
 public:
  virtual ~TrainingTarget() = default;
  virtual ParameterStore& parameters() = 0;
  // Per-token input ids; a generator enables word dropout.
  virtual std::vector<int> input_ids(const Sentence& s, std::mt19937_64* rng) const = 0;
  // Builds the sentence's graph on `tape` and returns the initial state.
  virtual Episode begin(Tape& tape, const Sentence& s, std::span<const int> input_ids) = 0;
  virtual std::vector<int> gold_relations(const Sentence& s) const = 0;
};

struct TrainOptions {
  std::size_t epochs = 15;
  std::size_t error_threshold = 50;  // update when the error count exceeds this
  bool exploration = true;           // follow invalid actions that beat the best valid one by the margin
  bool shuffle = true;
  std::uint64_t seed = 1;
  // Stop after the first epoch whose dev UAS and LAS both reach this value.
  std::optional<double> stop_at_dev_score;
  AdamOptions adam;
};

// Positive-loss steps since the last update. Their gradients are already
// accumulated in Parameter::grad.
struct TrainBatch {
  std::size_t errors = 0;
  double loss = 0.0;
};

struct StepStats {
  std::size_t steps = 0;
  std::size_t errors = 0;
  std::size_t explored = 0;
  std::size_t updates = 0;
  double loss = 0.0;
};

// Parses one gold sentence under the dynamic oracle, accumulating hinge
// losses. Runs backward + Adam whenever the batch error count exceeds the
// threshold, then rebuilds the sentence graph under the new parameters and
// replays the actions taken so far.
StepStats train_step(const Sentence& sentence, TrainingTarget& target, TrainBatch& batch, const TrainOptions& options,
                     std::mt19937_64& rng);

// Applies the pending update (if any errors are batched) and resets.
bool flush_batch(TrainingTarget& target, TrainBatch& batch, const TrainOptions& options);

struct EpochStats {
  std::size_t epoch = 0;
  std::size_t sentences = 0;
  double total_loss = 0.0;
  std::size_t errors = 0;
  std::size_t updates = 0;
  std::optional<double> dev_uas;
  std::optional<double> dev_las;
};

struct TrainResult {
  std::vector<EpochStats> epochs;
  std::size_t skipped_nonprojective = 0;
  std::optional<std::size_t> best_epoch;
};

// Returns (UAS, LAS) on held-out data under the current parameters.
using DevEvaluator = std::function<std::pair<double, double>()>;

// Epoch loop. Non-projective sentences are skipped and counted. With a dev
// evaluator the parameters from the best-UAS epoch are restored at the end
// (and the loop may stop early, see TrainOptions::stop_at_dev_score).
TrainResult train(const std::vector<Sentence>& corpus, TrainingTarget& target, const TrainOptions& options,
                  const DevEvaluator& dev = {}, std::ostream* log = nullptr);

std::string format_epoch(const EpochStats& e);

}  // namespace efdp
