#include "efdp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "efdp/error.hpp"
#include "efdp/kernels.hpp"

namespace efdp {

const Shape& Tensor::shape() const { return tape_->shape_of(id_); }

std::span<const double> Tensor::value() const {
  return {tape_->data_of(id_), tape_->shape_of(id_).size()};
}

double Tensor::scalar() const {
  if (shape().size() != 1) throw ShapeError("scalar() on tensor of shape " + shape().str());
  return value()[0];
}

std::span<const double> Tensor::grad() const { return tape_->grad_of(id_); }

const double* Tape::data_of(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.param ? n.param->value.data() : n.value.data();
}

std::span<const double> Tape::grad_of(std::uint32_t id) const {
  const Node& n = nodes_[id];
  if (!n.reached) return {};
  if (n.param) return n.param->grad;
  return n.grad;
}

Tensor Tape::record(Op op, Shape shape, std::vector<std::uint32_t> args, std::vector<double> value,
                    std::size_t index) {
  if (op != Op::input) {
    for (double v : value)
      if (!std::isfinite(v)) throw NumericError("non-finite value produced by op " + std::to_string(int(op)));
  }
  nodes_.push_back(Node{op, shape, std::move(args), std::move(value), {}, nullptr, index, false});
  return Tensor(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Tensor Tape::input(Shape shape, std::vector<double> values) {
  if (values.size() != shape.size())
    throw ShapeError("input: " + std::to_string(values.size()) + " values for shape " + shape.str());
  for (double v : values)
    if (!std::isfinite(v)) throw NumericError("non-finite input value");
  return record(Op::input, shape, {}, std::move(values));
}

Tensor Tape::input(std::vector<double> column) {
  Shape s{column.size(), 1};
  return input(s, std::move(column));
}

Tensor Tape::scalar(double v) { return input(Shape{1, 1}, {v}); }

Tensor Tape::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Tensor(this, it->second);
  nodes_.push_back(Node{Op::parameter, p.shape, {}, {}, {}, &p, 0, false});
  auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  param_nodes_.emplace(&p, id);
  return Tensor(this, id);
}

void Tape::reset() {
  nodes_.clear();
  param_nodes_.clear();
  backward_done_ = false;
}

double* Tape::grad_buffer(std::uint32_t id) {
  Node& n = nodes_[id];
  n.reached = true;
  if (n.param) return n.param->grad.data();
  if (n.grad.empty()) n.grad.assign(n.shape.size(), 0.0);
  return n.grad.data();
}

void Tape::backward(Tensor loss) {
  if (loss.tape() != this) throw std::logic_error("backward: loss belongs to another tape");
  if (backward_done_) throw std::logic_error("backward called twice on the same tape without reset");
  if (shape_of(loss.id()).size() != 1) throw ShapeError("backward: loss must be (1,1), got " + shape_of(loss.id()).str());
  backward_done_ = true;
  grad_buffer(loss.id())[0] += 1.0;
  for (std::int64_t id = loss.id(); id >= 0; --id) {
    if (nodes_[id].reached) backward_node(static_cast<std::uint32_t>(id));
  }
}

void Tape::backward_node(std::uint32_t id) {
  // Copy what we need: grad_buffer() on an argument never reallocates
  // nodes_, but keep references local and explicit anyway.
  const Node& n = nodes_[id];
  const Op op = n.op;
  if (op == Op::input || op == Op::parameter) return;
  const double* g = n.param ? n.param->grad.data() : n.grad.data();
  const Shape shape = n.shape;
  const std::size_t size = shape.size();
  const auto& args = n.args;

  switch (op) {
    case Op::input:
    case Op::parameter:
      break;
    case Op::pick_row: {
      const Shape& xs = nodes_[args[0]].shape;
      double* gx = grad_buffer(args[0]) + n.index * xs.cols;
      for (std::size_t j = 0; j < size; ++j) gx[j] += g[j];
      break;
    }
    case Op::matmul: {
      const Shape& as = nodes_[args[0]].shape;
      const Shape& bs = nodes_[args[1]].shape;
      const double* a = data_of(args[0]);
      const double* b = data_of(args[1]);
      kernels::gemm_nt(as.rows, bs.cols, as.cols, g, b, grad_buffer(args[0]));
      kernels::gemm_tn(as.rows, as.cols, bs.cols, a, g, grad_buffer(args[1]));
      break;
    }
    case Op::affine: {
      double* gb = grad_buffer(args[0]);
      for (std::size_t j = 0; j < size; ++j) gb[j] += g[j];
      for (std::size_t t = 1; t + 1 < args.size(); t += 2) {
        const Shape& ws = nodes_[args[t]].shape;
        const double* w = data_of(args[t]);
        const double* x = data_of(args[t + 1]);
        kernels::gemm_nt(ws.rows, 1, ws.cols, g, x, grad_buffer(args[t]));
        kernels::gemm_tn(ws.rows, ws.cols, 1, w, g, grad_buffer(args[t + 1]));
      }
      break;
    }
    case Op::add: {
      double* ga = grad_buffer(args[0]);
      for (std::size_t j = 0; j < size; ++j) ga[j] += g[j];
      double* gb = grad_buffer(args[1]);
      for (std::size_t j = 0; j < size; ++j) gb[j] += g[j];
      break;
    }
    case Op::sub: {
      double* ga = grad_buffer(args[0]);
      for (std::size_t j = 0; j < size; ++j) ga[j] += g[j];
      double* gb = grad_buffer(args[1]);
      for (std::size_t j = 0; j < size; ++j) gb[j] -= g[j];
      break;
    }
    case Op::mul: {
      const double* a = data_of(args[0]);
      const double* b = data_of(args[1]);
      double* ga = grad_buffer(args[0]);
      for (std::size_t j = 0; j < size; ++j) ga[j] += g[j] * b[j];
      double* gb = grad_buffer(args[1]);
      for (std::size_t j = 0; j < size; ++j) gb[j] += g[j] * a[j];
      break;
    }
    case Op::tanh: {
      const double* y = n.value.data();
      double* gx = grad_buffer(args[0]);
      for (std::size_t j = 0; j < size; ++j) gx[j] += g[j] * (1.0 - y[j] * y[j]);
      break;
    }
    case Op::logistic: {
      const double* y = n.value.data();
      double* gx = grad_buffer(args[0]);
      for (std::size_t j = 0; j < size; ++j) gx[j] += g[j] * y[j] * (1.0 - y[j]);
      break;
    }
    case Op::concat: {
      std::size_t offset = 0;
      for (auto a : args) {
        const std::size_t len = nodes_[a].shape.size();
        double* ga = grad_buffer(a);
        for (std::size_t j = 0; j < len; ++j) ga[j] += g[offset + j];
        offset += len;
      }
      break;
    }
    case Op::pick:
      grad_buffer(args[0])[n.index] += g[0];
      break;
    case Op::slice: {
      double* gx = grad_buffer(args[0]) + n.index;
      for (std::size_t j = 0; j < size; ++j) gx[j] += g[j];
      break;
    }
    case Op::sum:
      for (auto a : args) {
        double* ga = grad_buffer(a);
        for (std::size_t j = 0; j < size; ++j) ga[j] += g[j];
      }
      break;
    case Op::sum_elements: {
      const std::size_t len = nodes_[args[0]].shape.size();
      double* gx = grad_buffer(args[0]);
      for (std::size_t j = 0; j < len; ++j) gx[j] += g[0];
      break;
    }
  }
}

namespace {

Tape& same_tape(const char* op, Tensor a, Tensor b) {
  if (!a.valid() || a.tape() != b.tape()) throw std::logic_error(std::string(op) + ": operands on different tapes");
  return *a.tape();
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.str() + " and " + b.str());
}

template <class F>
Tensor elementwise(const char* op, Tape::Op code, Tensor a, Tensor b, F f) {
  Tape& t = same_tape(op, a, b);
  if (a.shape() != b.shape()) shape_error(op, a.shape(), b.shape());
  auto av = a.value();
  auto bv = b.value();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
  return t.record(code, a.shape(), {a.id(), b.id()}, std::move(out));
}

}  // namespace

Tensor matmul(Tensor a, Tensor b) {
  Tape& t = same_tape("matmul", a, b);
  const Shape as = a.shape(), bs = b.shape();
  if (as.cols != bs.rows) shape_error("matmul", as, bs);
  std::vector<double> out(as.rows * bs.cols, 0.0);
  kernels::gemm_nn(as.rows, as.cols, bs.cols, t.data_of(a.id()), t.data_of(b.id()), out.data());
  return t.record(Tape::Op::matmul, Shape{as.rows, bs.cols}, {a.id(), b.id()}, std::move(out));
}

Tensor affine(Tensor bias, std::span<const std::pair<Tensor, Tensor>> terms) {
  Tape& t = *bias.tape();
  const Shape bs = bias.shape();
  if (!bs.is_vector()) throw ShapeError("affine: bias must be a column vector, got " + bs.str());
  std::vector<double> out(bias.value().begin(), bias.value().end());
  std::vector<std::uint32_t> args{bias.id()};
  for (const auto& [w, x] : terms) {
    same_tape("affine", bias, w);
    same_tape("affine", bias, x);
    const Shape ws = w.shape(), xs = x.shape();
    if (ws.rows != bs.rows || !xs.is_vector() || ws.cols != xs.rows) shape_error("affine", ws, xs);
    kernels::gemm_nn(ws.rows, ws.cols, 1, t.data_of(w.id()), t.data_of(x.id()), out.data());
    args.push_back(w.id());
    args.push_back(x.id());
  }
  return t.record(Tape::Op::affine, bs, std::move(args), std::move(out));
}

Tensor affine(Tensor bias, std::initializer_list<std::pair<Tensor, Tensor>> terms) {
  return affine(bias, std::span<const std::pair<Tensor, Tensor>>(terms.begin(), terms.size()));
}

Tensor add(Tensor a, Tensor b) {
  return elementwise("add", Tape::Op::add, a, b, [](double x, double y) { return x + y; });
}

Tensor sub(Tensor a, Tensor b) {
  return elementwise("sub", Tape::Op::sub, a, b, [](double x, double y) { return x - y; });
}

Tensor pointwise_mul(Tensor a, Tensor b) {
  return elementwise("pointwise_mul", Tape::Op::mul, a, b, [](double x, double y) { return x * y; });
}

Tensor tanh(Tensor x) {
  auto v = x.value();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return x.tape()->record(Tape::Op::tanh, x.shape(), {x.id()}, std::move(out));
}

Tensor logistic(Tensor x) {
  auto v = x.value();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-v[i]));
  return x.tape()->record(Tape::Op::logistic, x.shape(), {x.id()}, std::move(out));
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  Tape& t = *parts.front().tape();
  std::vector<double> out;
  std::vector<std::uint32_t> args;
  for (const auto& p : parts) {
    same_tape("concat", parts.front(), p);
    if (!p.shape().is_vector()) throw ShapeError("concat: operand of shape " + p.shape().str() + " is not a vector");
    auto v = p.value();
    out.insert(out.end(), v.begin(), v.end());
    args.push_back(p.id());
  }
  Shape s{out.size(), 1};
  return t.record(Tape::Op::concat, s, std::move(args), std::move(out));
}

Tensor concat(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor pick_row(Tensor x, std::size_t row) {
  const Shape s = x.shape();
  if (row >= s.rows)
    throw ShapeError("pick_row: row " + std::to_string(row) + " out of range for shape " + s.str());
  auto v = x.value();
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(row * s.cols),
                          v.begin() + static_cast<std::ptrdiff_t>((row + 1) * s.cols));
  return x.tape()->record(Tape::Op::pick_row, Shape{s.cols, 1}, {x.id()}, std::move(out), row);
}

Tensor pick(Tensor x, std::size_t i) {
  const Shape s = x.shape();
  if (i >= s.size()) throw ShapeError("pick: index " + std::to_string(i) + " out of range for shape " + s.str());
  return x.tape()->record(Tape::Op::pick, Shape{1, 1}, {x.id()}, {x.value()[i]}, i);
}

Tensor slice(Tensor x, std::size_t begin, std::size_t length) {
  const Shape s = x.shape();
  if (!s.is_vector() || begin + length > s.rows || length == 0)
    throw ShapeError("slice: [" + std::to_string(begin) + ", " + std::to_string(begin + length) +
                     ") out of range for shape " + s.str());
  auto v = x.value();
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(begin),
                          v.begin() + static_cast<std::ptrdiff_t>(begin + length));
  return x.tape()->record(Tape::Op::slice, Shape{length, 1}, {x.id()}, std::move(out), begin);
}

Tensor sum(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("sum: no operands");
  const Shape s = xs.front().shape();
  std::vector<double> out(s.size(), 0.0);
  std::vector<std::uint32_t> args;
  for (const auto& x : xs) {
    same_tape("sum", xs.front(), x);
    if (x.shape() != s) shape_error("sum", s, x.shape());
    auto v = x.value();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[j];
    args.push_back(x.id());
  }
  return xs.front().tape()->record(Tape::Op::sum, s, std::move(args), std::move(out));
}

Tensor sum_elements(Tensor x) {
  double total = 0.0;
  for (double v : x.value()) total += v;
  return x.tape()->record(Tape::Op::sum_elements, Shape{1, 1}, {x.id()}, {total});
}

}  // namespace efdp
