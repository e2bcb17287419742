#pragma once

#include <optional>
#include <span>
#include <vector>

#include "efdp/easy_first.hpp"

namespace efdp {

// Dynamic oracle over a gold tree. An action attaching modifier m to head h
// with relation r is valid iff
//   * m is complete: none of m's gold children is still pending, and
//   * r is m's gold relation, and
//   * h is m's gold head, or m's gold head has already left the pending list.
class OracleState {
 public:
  // heads[i] / relations[i] describe token i+1; relation -1 never matches.
  OracleState(std::vector<int> gold_heads, std::vector<int> gold_relations);

  bool is_valid(const Action& action, const ParseState& state) const;
  std::vector<bool> valid_mask(const std::vector<Action>& actions, const ParseState& state) const;

  // Must be called with every arc the parser adds.
  void on_attach(const Arc& arc);

  int remaining_children(int token) const { return remaining_[static_cast<std::size_t>(token)]; }
  bool in_pending(int token) const { return pending_[static_cast<std::size_t>(token)]; }
  bool is_complete(int token) const { return remaining_children(token) == 0; }
  int gold_head(int token) const { return heads_[static_cast<std::size_t>(token - 1)]; }
  int gold_relation(int token) const { return relations_[static_cast<std::size_t>(token - 1)]; }

 private:
  std::vector<int> heads_;
  std::vector<int> relations_;
  std::vector<int> remaining_;  // index = token position, [0] unused
  std::vector<bool> pending_;
};

struct HingeChoice {
  double loss = 0.0;
  std::optional<std::size_t> best_valid;
  std::optional<std::size_t> best_invalid;
};

// max{0, 1 - max_valid score + max_invalid score}, with argmaxes chosen by
// canonical-order tie-breaking. Throws std::logic_error when no action is
// valid; loss is 0 when every action is valid.
HingeChoice hinge_select(const std::vector<Action>& scored, const std::vector<bool>& valid);
double hinge_value(std::span<const double> scores, const std::vector<bool>& valid);

// The same loss as a tape expression (1 - s_valid + s_invalid), or nullopt
// when it is zero and contributes no gradient.
std::optional<Tensor> hinge_loss(const std::vector<Action>& scored, const std::vector<bool>& valid,
                                 ActionScorer& scorer);

}  // namespace efdp
