#include "efdp/easy_first.hpp"

#include <stdexcept>

#include "efdp/error.hpp"

namespace efdp {

const char* to_string(Direction d) noexcept { return d == Direction::left ? "LEFT" : "RIGHT"; }

std::vector<int> heads_of(const ArcList& arcs, std::size_t n) {
  std::vector<int> heads(n, 0);
  for (const auto& a : arcs) {
    if (a.dependent < 1 || static_cast<std::size_t>(a.dependent) > n)
      throw std::out_of_range("arc dependent " + std::to_string(a.dependent) + " out of range");
    heads[static_cast<std::size_t>(a.dependent - 1)] = a.head;
  }
  return heads;
}

TreeEncoder::TreeEncoder(ParameterStore& store, std::size_t word_dim, std::size_t hidden_dim,
                         std::size_t relation_dim, std::size_t relation_count, std::mt19937_64& rng)
    : word_dim_(word_dim), relation_count_(relation_count) {
  const std::size_t input = word_dim + relation_dim;
  left_ = LstmCell(store, "tree_left", input, hidden_dim, rng);
  right_ = LstmCell(store, "tree_right", input, hidden_dim, rng);
  relation_embed_ = &store.add("embed/relation", Shape{relation_count, relation_dim}, Init::embedding, rng);
  null_label_ = &store.add("tree/null_label", Shape{relation_dim, 1}, Init::embedding, rng);
  enc_w_ = &store.add("tree_enc/W", Shape{word_dim, 2 * hidden_dim + relation_dim}, Init::glorot, rng);
  enc_b_ = &store.add("tree_enc/b", Shape{word_dim, 1}, Init::zeros, rng);
}

Tensor TreeEncoder::label(Tape& tape, int relation) const {
  if (relation < 0) return tape.param(*null_label_);
  return pick_row(tape.param(*relation_embed_), static_cast<std::size_t>(relation));
}

Tensor TreeEncoder::encode(Tape& tape, const PendingItem& item) const {
  Tensor x = concat({item.left_state->h, item.right_state->h, label(tape, item.last_relation)});
  return tanh(affine(tape.param(*enc_b_), {{tape.param(*enc_w_), x}}));
}

void TreeEncoder::init_item(Tape& tape, PendingItem& item, Tensor word_vector) const {
  if (word_vector.shape() != Shape{word_dim_, 1})
    throw ShapeError("tree encoder: word vector shape " + word_vector.shape().str() + ", expected (" +
                     std::to_string(word_dim_) + ",1)");
  Tensor input = concat({word_vector, tape.param(*null_label_)});
  item.left_state = left_.step(tape, std::nullopt, input);
  item.right_state = right_.step(tape, std::nullopt, input);
  item.last_relation = -1;
  item.encoding = encode(tape, item);
}

void TreeEncoder::attach(Tape& tape, PendingItem& head, const PendingItem& child, Direction side,
                         int relation) const {
  Tensor input = concat({child.encoding, label(tape, relation)});
  if (side == Direction::left)
    head.left_state = left_.step(tape, head.left_state, input);
  else
    head.right_state = right_.step(tape, head.right_state, input);
  head.last_relation = relation;
  head.encoding = encode(tape, head);
}

std::vector<PendingItem> init_pending(Tape& tape, const TreeEncoder& encoder, const std::vector<Tensor>& word_vectors) {
  if (word_vectors.empty()) throw std::invalid_argument("init_pending: empty sentence");
  std::vector<PendingItem> items(word_vectors.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].head_index = static_cast<int>(i) + 1;
    encoder.init_item(tape, items[i], word_vectors[i]);
  }
  return items;
}

std::vector<PendingItem> init_pending(std::size_t n) {
  if (n == 0) throw std::invalid_argument("init_pending: empty sentence");
  std::vector<PendingItem> items(n);
  for (std::size_t i = 0; i < n; ++i) items[i].head_index = static_cast<int>(i) + 1;
  return items;
}

std::vector<Action> enumerate_actions(std::size_t pending_size, std::size_t relation_count) {
  if (pending_size < 2) throw std::invalid_argument("enumerate_actions: parse already complete");
  std::vector<Action> actions;
  actions.reserve(2 * relation_count * (pending_size - 1));
  for (std::size_t i = 1; i < pending_size; ++i)
    for (Direction d : {Direction::left, Direction::right})
      for (std::size_t r = 0; r < relation_count; ++r) actions.push_back(Action{i, d, static_cast<int>(r), 0.0});
  return actions;
}

Arc apply_action(ParseState& state, const Action& action, const TreeEncoder* encoder, Tape* tape) {
  auto& pending = state.pending;
  if (action.position < 1 || action.position >= pending.size())
    throw std::out_of_range("apply_action: position " + std::to_string(action.position) + " invalid for " +
                            std::to_string(pending.size()) + " pending items");
  const std::size_t left = action.position - 1;
  const std::size_t right = action.position;
  const bool is_left = action.direction == Direction::left;
  PendingItem& head = pending[is_left ? right : left];
  const std::size_t child_index = is_left ? left : right;
  const PendingItem& child = pending[child_index];

  Arc arc{head.head_index, child.head_index, action.relation};
  (is_left ? head.left_children : head.right_children).push_back(child.head_index);
  if (encoder) {
    encoder->attach(*tape, head, child, action.direction, action.relation);
  } else {
    head.last_relation = action.relation;
  }
  ++head.version;
  state.arcs.push_back(arc);
  pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(child_index));
  return arc;
}

std::optional<std::size_t> best_action(const std::vector<Action>& actions) {
  return best_action(actions, [](std::size_t) { return true; });
}

ScoringNet::ScoringNet(ParameterStore& store, std::size_t encoding_dim, std::size_t hidden_dim,
                       std::size_t relation_count, std::mt19937_64& rng)
    : unlabeled(store, "mlp_u", {kWindow * encoding_dim, hidden_dim, 2}, rng),
      labeled(store, "mlp_r", {kWindow * encoding_dim, hidden_dim, 2 * relation_count}, rng) {
  pad_left = &store.add("score/pad_left", Shape{encoding_dim, 1}, Init::embedding, rng);
  pad_right = &store.add("score/pad_right", Shape{encoding_dim, 1}, Init::embedding, rng);
}

NeuralScorer::NeuralScorer(const ScoringNet& net, Tape& tape, std::size_t relation_count, bool incremental)
    : net_(&net), tape_(&tape), relation_count_(relation_count), incremental_(incremental) {}

NeuralScorer::PointScores NeuralScorer::evaluate(const ParseState& state, std::size_t position) {
  const auto n = static_cast<std::ptrdiff_t>(state.pending.size());
  std::vector<Tensor> slots;
  slots.reserve(ScoringNet::kWindow);
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(position) - 2; k <= static_cast<std::ptrdiff_t>(position) + 3;
       ++k) {
    if (k < 1)
      slots.push_back(tape_->param(*net_->pad_left));
    else if (k > n)
      slots.push_back(tape_->param(*net_->pad_right));
    else
      slots.push_back(state.pending[static_cast<std::size_t>(k - 1)].encoding);
  }
  Tensor x = concat(slots);
  ++evaluated_;
  return {mlp_apply(net_->unlabeled, *tape_, x), mlp_apply(net_->labeled, *tape_, x)};
}

std::vector<Action> NeuralScorer::score(const ParseState& state) {
  const std::size_t n = state.pending.size();
  if (n < 2) throw std::invalid_argument("score: parse already complete");
  current_.clear();
  for (std::size_t i = 1; i < n; ++i) {
    if (!incremental_) {
      current_.push_back(evaluate(state, i));
      continue;
    }
    WindowKey key;
    for (std::size_t s = 0; s < ScoringNet::kWindow; ++s) {
      const auto k = static_cast<std::ptrdiff_t>(i) - 2 + static_cast<std::ptrdiff_t>(s);
      if (k < 1)
        key[s] = {-1, 0};
      else if (k > static_cast<std::ptrdiff_t>(n))
        key[s] = {-2, 0};
      else {
        const auto& item = state.pending[static_cast<std::size_t>(k - 1)];
        key[s] = {item.head_index, item.version};
      }
    }
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, evaluate(state, i)).first;
    current_.push_back(it->second);
  }
  std::vector<Action> actions = enumerate_actions(n, relation_count_);
  for (auto& a : actions) {
    const auto& p = current_[a.position - 1];
    const auto d = static_cast<std::size_t>(a.direction);
    a.score = p.unlabeled[d] + p.labeled[2 * static_cast<std::size_t>(a.relation) + d];
  }
  return actions;
}

std::optional<Tensor> NeuralScorer::score_tensor(const Action& action) {
  if (action.position < 1 || action.position > current_.size())
    throw std::out_of_range("score_tensor: action not from the latest score() call");
  const auto& p = current_[action.position - 1];
  const auto d = static_cast<std::size_t>(action.direction);
  return add(pick(p.unlabeled, d), pick(p.labeled, 2 * static_cast<std::size_t>(action.relation) + d));
}

ArcList greedy_parse(ParseState& state, ActionScorer& scorer, int root_relation, const TreeEncoder* encoder,
                     Tape* tape, std::vector<TraceStep>* trace) {
  std::size_t step = 0;
  while (state.pending.size() > 1) {
    auto actions = scorer.score(state);
    auto best = best_action(actions);
    if (!best) throw std::logic_error("greedy_parse: scorer returned no actions");
    const Action chosen = actions[*best];
    Arc arc = apply_action(state, chosen, encoder, tape);
    if (trace) trace->push_back(TraceStep{++step, chosen, arc});
  }
  state.arcs.push_back(Arc{0, state.pending.front().head_index, root_relation});
  return state.arcs;
}

}  // namespace efdp
