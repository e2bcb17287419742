#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "efdp/layers.hpp"
#include "efdp/tensor.hpp"

namespace efdp {

enum class Direction : std::uint8_t { left = 0, right = 1 };

const char* to_string(Direction d) noexcept;

// LEFT(i, r) makes p_i a left dependent of p_{i+1}; RIGHT(i, r) makes
// p_{i+1} a right dependent of p_i. `position` is 1-based.
struct Action {
  std::size_t position = 1;
  Direction direction = Direction::left;
  int relation = 0;
  double score = 0.0;

  bool same_move(const Action& o) const noexcept {
    return position == o.position && direction == o.direction && relation == o.relation;
  }
};

struct Arc {
  int head = 0;  // sentence position, 0 = artificial root
  int dependent = 0;
  int relation = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

using ArcList = std::vector<Arc>;

// Heads indexed by dependent position - 1; 0 for unattached tokens.
std::vector<int> heads_of(const ArcList& arcs, std::size_t n);

// One partial structure on the pending list.
struct PendingItem {
  int head_index = 0;                 // sentence position of the head word
  std::vector<int> left_children;     // nearest first
  std::vector<int> right_children;    // nearest first
  int last_relation = -1;             // relation of the most recent attachment
  std::optional<LstmState> left_state;
  std::optional<LstmState> right_state;
  Tensor encoding;
  std::uint32_t version = 0;          // bumped on every attachment
};

struct ParseState {
  std::vector<PendingItem> pending;
  ArcList arcs;
  std::size_t relation_count = 0;
};

// Tree-LSTM encoder of partial structures.
//
//   enc(t) = tanh(W^e [e_l(t) | e_r(t) | l(t)] + b^e)
//   e_l(t) = LSTM_L(v(t), child_1, ..., child_k)   (nearest child first)
//
// Each LSTM input is a word or child encoding concatenated with a relation
// embedding; the head word's own input and leaves use a learned null label.
// Encoding width equals the word vector width so head and child inputs share
// the LSTM input size.
class TreeEncoder {
 public:
  TreeEncoder() = default;
  TreeEncoder(ParameterStore& store, std::size_t word_dim, std::size_t hidden_dim, std::size_t relation_dim,
              std::size_t relation_count, std::mt19937_64& rng);

  std::size_t encoding_dim() const noexcept { return word_dim_; }
  std::size_t relation_count() const noexcept { return relation_count_; }

  // Seeds both LSTMs with the word vector and computes the leaf encoding.
  void init_item(Tape& tape, PendingItem& item, Tensor word_vector) const;
  // Appends `child` (with relation) to the head's left or right LSTM and
  // recomputes the head's encoding.
  void attach(Tape& tape, PendingItem& head, const PendingItem& child, Direction side, int relation) const;
  Tensor encode(Tape& tape, const PendingItem& item) const;

 private:
  Tensor label(Tape& tape, int relation) const;

  std::size_t word_dim_ = 0;
  std::size_t relation_count_ = 0;
  LstmCell left_, right_;
  Parameter* relation_embed_ = nullptr;
  Parameter* null_label_ = nullptr;
  Parameter* enc_w_ = nullptr;
  Parameter* enc_b_ = nullptr;
};

// One pending item per word vector, each a leaf.
std::vector<PendingItem> init_pending(Tape& tape, const TreeEncoder& encoder, const std::vector<Tensor>& word_vectors);
// Structure-only pending list (no neural state), positions 1..n.
std::vector<PendingItem> init_pending(std::size_t n);

// All 2R(n-1) actions in canonical order: position ascending, LEFT before
// RIGHT, relation ascending. Throws when n < 2.
std::vector<Action> enumerate_actions(std::size_t pending_size, std::size_t relation_count);

// Applies the action: records the arc, feeds the modifier into the
// receiver (when an encoder is given) and removes the modifier.
// Returns the new arc. Throws std::out_of_range for a bad position.
Arc apply_action(ParseState& state, const Action& action, const TreeEncoder* encoder = nullptr, Tape* tape = nullptr);

// First maximum in canonical order; nullopt when nothing passes `keep`.
template <class Pred>
std::optional<std::size_t> best_action(const std::vector<Action>& actions, Pred keep) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (!keep(k)) continue;
    if (!best || actions[k].score > actions[*best].score) best = k;
  }
  return best;
}
std::optional<std::size_t> best_action(const std::vector<Action>& actions);

class ActionScorer {
 public:
  virtual ~ActionScorer() = default;
  // Scores every action of the current state, in canonical order.
  virtual std::vector<Action> score(const ParseState& state) = 0;
  // Differentiable score of an action from the most recent score() call;
  // nullopt for scorers without a computation graph.
  virtual std::optional<Tensor> score_tensor(const Action&) { return std::nullopt; }
};

// MLP_U / MLP_R over the window x_i = [p_{i-2} | ... | p_{i+3}], with
// learned left/right padding outside the pending list.
struct ScoringNet {
  static constexpr std::size_t kWindow = 6;
  Mlp unlabeled;  // output 2
  Mlp labeled;    // output 2R, index 2r + direction
  Parameter* pad_left = nullptr;
  Parameter* pad_right = nullptr;

  ScoringNet() = default;
  ScoringNet(ParameterStore& store, std::size_t encoding_dim, std::size_t hidden_dim, std::size_t relation_count,
             std::mt19937_64& rng);
};

// Neural scorer. With incremental rescoring, a window whose six slots hold
// the same items at the same versions reuses its cached MLP outputs.
class NeuralScorer : public ActionScorer {
 public:
  NeuralScorer(const ScoringNet& net, Tape& tape, std::size_t relation_count, bool incremental = true);

  std::vector<Action> score(const ParseState& state) override;
  std::optional<Tensor> score_tensor(const Action& action) override;

  std::size_t windows_evaluated() const noexcept { return evaluated_; }

 private:
  using SlotKey = std::pair<int, std::uint32_t>;
  using WindowKey = std::array<SlotKey, ScoringNet::kWindow>;
  struct PointScores {
    Tensor unlabeled;
    Tensor labeled;
  };

  PointScores evaluate(const ParseState& state, std::size_t position);

  const ScoringNet* net_;
  Tape* tape_;
  std::size_t relation_count_;
  bool incremental_;
  std::map<WindowKey, PointScores> cache_;
  std::vector<PointScores> current_;
  std::size_t evaluated_ = 0;
};

struct TraceStep {
  std::size_t step = 0;
  Action action;
  Arc arc;
};

// Greedy loop: score, apply the argmax, until one item remains; the
// survivor is attached to the root with `root_relation`. Returns n arcs.
ArcList greedy_parse(ParseState& state, ActionScorer& scorer, int root_relation, const TreeEncoder* encoder = nullptr,
                     Tape* tape = nullptr, std::vector<TraceStep>* trace = nullptr);

}  // namespace efdp
