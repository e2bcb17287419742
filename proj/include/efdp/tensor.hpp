#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "efdp/params.hpp"

namespace efdp {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid until the
// tape is reset or destroyed.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape() const noexcept { return tape_; }
  std::uint32_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

  const Shape& shape() const;
  std::span<const double> value() const;
  double operator[](std::size_t i) const { return value()[i]; }
  // Value of a (1,1) tensor.
  double scalar() const;
  // Gradient after Tape::backward; empty if the node was unreachable.
  std::span<const double> grad() const;

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

// Records forward operations in execution order so that backward can visit
// them in exact reverse. One tape per sentence; not thread-safe.
//
// Parameter nodes read the parameter's storage in place and backward adds
// straight into Parameter::grad, so a tape must not outlive a change to the
// parameters it references.
class Tape {
 public:
  enum class Op : std::uint8_t {
    input,
    parameter,
    pick_row,
    matmul,
    affine,
    add,
    sub,
    mul,
    tanh,
    logistic,
    concat,
    pick,
    slice,
    sum,
    sum_elements,
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor input(Shape shape, std::vector<double> values);
  Tensor input(std::vector<double> column);
  Tensor scalar(double v);
  // Repeated calls for the same parameter return the same node.
  Tensor param(Parameter& p);

  // Accumulates d(loss)/d(x) for every node reachable from `loss` and adds
  // parameter gradients into Parameter::grad. Throws if called twice
  // without reset().
  void backward(Tensor loss);
  void reset();

  std::size_t size() const noexcept { return nodes_.size(); }
  bool backward_done() const noexcept { return backward_done_; }

  // Used by the op functions below.
  const Shape& shape_of(std::uint32_t id) const { return nodes_[id].shape; }
  const double* data_of(std::uint32_t id) const;
  std::span<const double> grad_of(std::uint32_t id) const;
  Tensor record(Op op, Shape shape, std::vector<std::uint32_t> args, std::vector<double> value,
                std::size_t index = 0);

 private:
  struct Node {
    Op op;
    Shape shape;
    std::vector<std::uint32_t> args;
    std::vector<double> value;
    std::vector<double> grad;
    Parameter* param = nullptr;
    std::size_t index = 0;
    bool reached = false;
  };

  double* grad_buffer(std::uint32_t id);
  void backward_node(std::uint32_t id);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
  bool backward_done_ = false;
};

// Forward ops. Each checks operand shapes (ShapeError naming the op) and
// that its result is finite (NumericError).
Tensor matmul(Tensor a, Tensor b);
// bias + sum_k W_k * x_k, fused.
Tensor affine(Tensor bias, std::initializer_list<std::pair<Tensor, Tensor>> terms);
Tensor affine(Tensor bias, std::span<const std::pair<Tensor, Tensor>> terms);
Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor pointwise_mul(Tensor a, Tensor b);
Tensor tanh(Tensor x);
Tensor logistic(Tensor x);
Tensor concat(std::span<const Tensor> parts);
Tensor concat(std::initializer_list<Tensor> parts);
// Row `row` of a matrix, as a column vector.
Tensor pick_row(Tensor x, std::size_t row);
// Element `i` of a vector, as a (1,1) tensor.
Tensor pick(Tensor x, std::size_t i);
// Elements [begin, begin + length) of a vector.
Tensor slice(Tensor x, std::size_t begin, std::size_t length);
// Elementwise sum of equally shaped tensors.
Tensor sum(std::span<const Tensor> xs);
Tensor sum_elements(Tensor x);

inline Tensor operator+(Tensor a, Tensor b) { return add(a, b); }
inline Tensor operator-(Tensor a, Tensor b) { return sub(a, b); }

}  // namespace efdp
