#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "efdp/params.hpp"
#include "efdp/tensor.hpp"

namespace efdp {

struct LstmState {
  Tensor h;
  Tensor c;
};

// Standard LSTM cell: logistic input/forget/output gates, tanh candidate.
// Parameters are registered as `<name>/<gate>/{Wx,Wh,b}` with gates
// i, f, o, g.
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t hidden_dim,
           std::mt19937_64& rng);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }

  // One recurrence step. An empty `prev` stands for the zero initial state.
  LstmState step(Tape& tape, const std::optional<LstmState>& prev, Tensor x) const;

 private:
  struct Gate {
    Parameter* wx = nullptr;
    Parameter* wh = nullptr;
    Parameter* b = nullptr;
  };
  Tensor gate(Tape& tape, const Gate& g, const std::optional<LstmState>& prev, Tensor x) const;

  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  Gate input_, forget_, output_, candidate_;
};

LstmState lstm_step(const LstmCell& cell, Tape& tape, const std::optional<LstmState>& prev, Tensor x);

// Stacked bidirectional LSTM. Layer k > 0 reads the concatenated
// forward/backward outputs of layer k-1.
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t hidden_dim,
         std::size_t layers, std::mt19937_64& rng);
  BiLstm(std::vector<LstmCell> forward, std::vector<LstmCell> backward);

  std::size_t output_dim() const noexcept;
  std::size_t layers() const noexcept { return forward_.size(); }
  const std::vector<LstmCell>& forward() const noexcept { return forward_; }
  const std::vector<LstmCell>& backward() const noexcept { return backward_; }

 private:
  std::vector<LstmCell> forward_;
  std::vector<LstmCell> backward_;
};

// output[i] = concat(forward state after i+1 steps, backward state after
// n-i steps) of the top layer. Throws on empty input.
std::vector<Tensor> run_bilstm(const BiLstm& net, Tape& tape, const std::vector<Tensor>& inputs);

// Feed-forward network: tanh hidden layers, linear output layer.
// Parameters `<name>/<k>/W` and `<name>/<k>/b`.
class Mlp {
 public:
  Mlp() = default;
  // dims = {input, hidden..., output}
  Mlp(ParameterStore& store, const std::string& name, const std::vector<std::size_t>& dims, std::mt19937_64& rng);

  std::size_t input_dim() const noexcept;
  std::size_t output_dim() const noexcept;
  std::size_t depth() const noexcept { return layers_.size(); }
  Parameter& weight(std::size_t layer) const { return *layers_[layer].w; }
  Parameter& bias(std::size_t layer) const { return *layers_[layer].b; }

 private:
  struct Layer {
    Parameter* w = nullptr;
    Parameter* b = nullptr;
  };
  std::vector<Layer> layers_;
};

Tensor mlp_apply(const Mlp& mlp, Tape& tape, Tensor x);

}  // namespace efdp
