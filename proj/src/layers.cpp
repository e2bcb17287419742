#include "efdp/layers.hpp"

#include "efdp/error.hpp"

namespace efdp {

LstmCell::LstmCell(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t hidden_dim,
                   std::mt19937_64& rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  auto make = [&](const char* gate) {
    const std::string prefix = name + "/" + gate + "/";
    Gate g;
    g.wx = &store.add(prefix + "Wx", Shape{hidden_dim, input_dim}, Init::glorot, rng);
    g.wh = &store.add(prefix + "Wh", Shape{hidden_dim, hidden_dim}, Init::glorot, rng);
    g.b = &store.add(prefix + "b", Shape{hidden_dim, 1}, Init::zeros, rng);
    return g;
  };
  input_ = make("i");
  forget_ = make("f");
  output_ = make("o");
  candidate_ = make("g");
}

Tensor LstmCell::gate(Tape& tape, const Gate& g, const std::optional<LstmState>& prev, Tensor x) const {
  if (prev) return affine(tape.param(*g.b), {{tape.param(*g.wx), x}, {tape.param(*g.wh), prev->h}});
  return affine(tape.param(*g.b), {{tape.param(*g.wx), x}});
}

LstmState LstmCell::step(Tape& tape, const std::optional<LstmState>& prev, Tensor x) const {
  if (x.shape() != Shape{input_dim_, 1})
    throw ShapeError("lstm_step: input shape " + x.shape().str() + ", cell expects (" + std::to_string(input_dim_) +
                     ",1)");
  Tensor i = logistic(gate(tape, input_, prev, x));
  Tensor f = logistic(gate(tape, forget_, prev, x));
  Tensor o = logistic(gate(tape, output_, prev, x));
  Tensor g = tanh(gate(tape, candidate_, prev, x));
  Tensor c = prev ? add(pointwise_mul(f, prev->c), pointwise_mul(i, g)) : pointwise_mul(i, g);
  Tensor h = pointwise_mul(o, tanh(c));
  return {h, c};
}

LstmState lstm_step(const LstmCell& cell, Tape& tape, const std::optional<LstmState>& prev, Tensor x) {
  return cell.step(tape, prev, x);
}

BiLstm::BiLstm(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t hidden_dim,
               std::size_t layers, std::mt19937_64& rng) {
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = k == 0 ? input_dim : 2 * hidden_dim;
    forward_.emplace_back(store, name + "/fwd" + std::to_string(k), in, hidden_dim, rng);
    backward_.emplace_back(store, name + "/bwd" + std::to_string(k), in, hidden_dim, rng);
  }
}

BiLstm::BiLstm(std::vector<LstmCell> forward, std::vector<LstmCell> backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
  if (forward_.size() != backward_.size() || forward_.empty())
    throw ShapeError("BiLstm: forward and backward stacks must be non-empty and equally deep");
}

std::size_t BiLstm::output_dim() const noexcept {
  return forward_.empty() ? 0 : forward_.back().hidden_dim() + backward_.back().hidden_dim();
}

std::vector<Tensor> run_bilstm(const BiLstm& net, Tape& tape, const std::vector<Tensor>& inputs) {
  if (inputs.empty()) throw ShapeError("run_bilstm: empty input sequence");
  std::vector<Tensor> layer_in = inputs;
  const std::size_t n = inputs.size();
  for (std::size_t k = 0; k < net.layers(); ++k) {
    std::vector<Tensor> fwd(n), bwd(n);
    std::optional<LstmState> state;
    for (std::size_t i = 0; i < n; ++i) {
      state = net.forward()[k].step(tape, state, layer_in[i]);
      fwd[i] = state->h;
    }
    state.reset();
    for (std::size_t i = n; i-- > 0;) {
      state = net.backward()[k].step(tape, state, layer_in[i]);
      bwd[i] = state->h;
    }
    for (std::size_t i = 0; i < n; ++i) layer_in[i] = concat({fwd[i], bwd[i]});
  }
  return layer_in;
}

Mlp::Mlp(ParameterStore& store, const std::string& name, const std::vector<std::size_t>& dims,
         std::mt19937_64& rng) {
  if (dims.size() < 2) throw ShapeError("Mlp: need at least input and output dims");
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const std::string prefix = name + "/" + std::to_string(k) + "/";
    Layer l;
    l.w = &store.add(prefix + "W", Shape{dims[k + 1], dims[k]}, Init::glorot, rng);
    l.b = &store.add(prefix + "b", Shape{dims[k + 1], 1}, Init::zeros, rng);
    layers_.push_back(l);
  }
}

std::size_t Mlp::input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().w->shape.cols; }
std::size_t Mlp::output_dim() const noexcept { return layers_.empty() ? 0 : layers_.back().w->shape.rows; }

Tensor mlp_apply(const Mlp& mlp, Tape& tape, Tensor x) {
  if (x.shape() != Shape{mlp.input_dim(), 1})
    throw ShapeError("mlp_apply: input shape " + x.shape().str() + ", network expects (" +
                     std::to_string(mlp.input_dim()) + ",1)");
  Tensor h = x;
  for (std::size_t k = 0; k < mlp.depth(); ++k) {
    h = affine(tape.param(mlp.bias(k)), {{tape.param(mlp.weight(k)), h}});
    if (k + 1 < mlp.depth()) h = tanh(h);
  }
  return h;
}

}  // namespace efdp
