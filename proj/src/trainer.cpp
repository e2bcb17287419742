#include "efdp/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "efdp/error.hpp"

namespace efdp {
namespace {

void backward_losses(Tape& tape, std::vector<Tensor>& losses) {
  if (losses.empty()) return;
  tape.backward(losses.size() == 1 ? losses.front() : sum(losses));
  losses.clear();
}

std::vector<int> gold_heads(const Sentence& s) {
  std::vector<int> heads;
  heads.reserve(s.size());
  for (const auto& t : s.tokens) heads.push_back(t.head);
  return heads;
}

}  // namespace

bool flush_batch(TrainingTarget& target, TrainBatch& batch, const TrainOptions& options) {
  if (batch.errors == 0) return false;
  adam_step(target.parameters(), options.adam);
  batch = TrainBatch{};
  return true;
}

StepStats train_step(const Sentence& sentence, TrainingTarget& target, TrainBatch& batch, const TrainOptions& options,
                     std::mt19937_64& rng) {
  StepStats stats;
  const auto ids = target.input_ids(sentence, &rng);
  OracleState oracle(gold_heads(sentence), target.gold_relations(sentence));

  auto tape = std::make_unique<Tape>();
  Episode episode = target.begin(*tape, sentence, ids);
  std::vector<Action> history;
  std::vector<Tensor> losses;

  while (episode.state.pending.size() > 1) {
    auto actions = episode.scorer->score(episode.state);
    auto valid = oracle.valid_mask(actions, episode.state);
    HingeChoice choice = hinge_select(actions, valid);

    Action chosen = actions[*choice.best_valid];
    if (options.exploration && choice.best_invalid &&
        actions[*choice.best_invalid].score > 1.0 + actions[*choice.best_valid].score) {
      chosen = actions[*choice.best_invalid];
      ++stats.explored;
    } else if (choice.loss > 0.0) {
      auto good = episode.scorer->score_tensor(actions[*choice.best_valid]);
      auto bad = episode.scorer->score_tensor(actions[*choice.best_invalid]);
      if (good && bad) losses.push_back(add(sub(tape->scalar(1.0), *good), *bad));
      ++batch.errors;
      batch.loss += choice.loss;
      ++stats.errors;
      stats.loss += choice.loss;
    }

    oracle.on_attach(apply_action(episode.state, chosen, episode.encoder, tape.get()));
    history.push_back(chosen);
    ++stats.steps;

    if (batch.errors > options.error_threshold) {
      backward_losses(*tape, losses);
      flush_batch(target, batch, options);
      ++stats.updates;
      if (episode.state.pending.size() > 1) {
        tape = std::make_unique<Tape>();
        episode = target.begin(*tape, sentence, ids);
        for (const auto& a : history) apply_action(episode.state, a, episode.encoder, tape.get());
      }
    }
  }
  backward_losses(*tape, losses);
  return stats;
}

TrainResult train(const std::vector<Sentence>& corpus, TrainingTarget& target, const TrainOptions& options,
                  const DevEvaluator& dev, std::ostream* log) {
  TrainResult result;
  std::vector<const Sentence*> usable;
  for (const auto& s : corpus) {
    if (is_projective(s))
      usable.push_back(&s);
    else
      ++result.skipped_nonprojective;
  }
  if (usable.empty()) throw ConfigError("training corpus has no projective sentences");
  if (log && result.skipped_nonprojective > 0)
    *log << "skipping " << result.skipped_nonprojective << " non-projective training sentences\n";

  std::mt19937_64 rng(options.seed);
  std::optional<std::vector<std::vector<double>>> best_params;
  double best_uas = -1.0;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    if (options.shuffle) std::shuffle(usable.begin(), usable.end(), rng);
    EpochStats es;
    es.epoch = epoch;
    TrainBatch batch;
    for (const Sentence* s : usable) {
      StepStats st = train_step(*s, target, batch, options, rng);
      es.total_loss += st.loss;
      es.errors += st.errors;
      es.updates += st.updates;
      ++es.sentences;
    }
    if (flush_batch(target, batch, options)) ++es.updates;
    if (dev) {
      auto [uas, las] = dev();
      es.dev_uas = uas;
      es.dev_las = las;
      if (uas > best_uas) {
        best_uas = uas;
        best_params = target.parameters().snapshot();
        result.best_epoch = epoch;
      }
    }
    if (log) *log << format_epoch(es) << '\n' << std::flush;
    result.epochs.push_back(es);
    if (options.stop_at_dev_score && es.dev_uas && *es.dev_uas >= *options.stop_at_dev_score &&
        *es.dev_las >= *options.stop_at_dev_score)
      break;
  }
  if (best_params) target.parameters().restore(*best_params);
  return result;
}

std::string format_epoch(const EpochStats& e) {
  std::ostringstream out;
  out << "epoch " << e.epoch << " sentences " << e.sentences << " loss " << std::fixed << std::setprecision(4)
      << e.total_loss << " errors " << e.errors << " updates " << e.updates;
  if (e.dev_uas) out << std::setprecision(2) << " dev_uas " << *e.dev_uas << " dev_las " << *e.dev_las;
  return out.str();
}

}  // namespace efdp
