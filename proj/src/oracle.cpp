#include "efdp/oracle.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace efdp {

OracleState::OracleState(std::vector<int> gold_heads, std::vector<int> gold_relations)
    : heads_(std::move(gold_heads)), relations_(std::move(gold_relations)) {
  if (heads_.size() != relations_.size()) throw std::invalid_argument("OracleState: heads/relations size mismatch");
  remaining_.assign(heads_.size() + 1, 0);
  pending_.assign(heads_.size() + 1, true);
  pending_[0] = false;
  for (int h : heads_)
    if (h > 0) ++remaining_[static_cast<std::size_t>(h)];
}

bool OracleState::is_valid(const Action& action, const ParseState& state) const {
  const auto& pending = state.pending;
  if (action.position < 1 || action.position >= pending.size()) return false;
  const bool is_left = action.direction == Direction::left;
  const int head = pending[is_left ? action.position : action.position - 1].head_index;
  const int mod = pending[is_left ? action.position - 1 : action.position].head_index;
  if (!is_complete(mod)) return false;
  if (action.relation != gold_relation(mod)) return false;
  const int gh = gold_head(mod);
  if (gh == head) return true;
  // The root is never on the pending list, so it never counts as removed.
  return gh > 0 && !in_pending(gh);
}

std::vector<bool> OracleState::valid_mask(const std::vector<Action>& actions, const ParseState& state) const {
  std::vector<bool> mask(actions.size());
  for (std::size_t k = 0; k < actions.size(); ++k) mask[k] = is_valid(actions[k], state);
  return mask;
}

void OracleState::on_attach(const Arc& arc) {
  const auto dep = static_cast<std::size_t>(arc.dependent);
  pending_[dep] = false;
  const int gh = heads_[dep - 1];
  if (gh > 0) {
    auto& count = remaining_[static_cast<std::size_t>(gh)];
    if (count <= 0) throw std::logic_error("OracleState: remaining-children count would go negative");
    --count;
  }
}

HingeChoice hinge_select(const std::vector<Action>& scored, const std::vector<bool>& valid) {
  HingeChoice c;
  c.best_valid = best_action(scored, [&](std::size_t k) { return bool(valid[k]); });
  c.best_invalid = best_action(scored, [&](std::size_t k) { return !valid[k]; });
  if (!c.best_valid) throw std::logic_error("hinge loss: no valid action");
  if (!c.best_invalid) return c;
  c.loss = std::max(0.0, 1.0 - scored[*c.best_valid].score + scored[*c.best_invalid].score);
  return c;
}

double hinge_value(std::span<const double> scores, const std::vector<bool>& valid) {
  std::vector<Action> actions(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) actions[k].score = scores[k];
  return hinge_select(actions, valid).loss;
}

std::optional<Tensor> hinge_loss(const std::vector<Action>& scored, const std::vector<bool>& valid,
                                 ActionScorer& scorer) {
  HingeChoice c = hinge_select(scored, valid);
  if (c.loss <= 0.0) return std::nullopt;
  auto good = scorer.score_tensor(scored[*c.best_valid]);
  auto bad = scorer.score_tensor(scored[*c.best_invalid]);
  if (!good || !bad) return std::nullopt;
  Tape& tape = *good->tape();
  return add(sub(tape.scalar(1.0), *good), *bad);
}

}  // namespace efdp
