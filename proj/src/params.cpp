#include "efdp/params.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "efdp/error.hpp"

namespace efdp {

Parameter& ParameterStore::add(const std::string& name, Shape shape, Init init, std::mt19937_64& rng) {
  std::vector<double> values(shape.size(), 0.0);
  double bound = 0.0;
  switch (init) {
    case Init::zeros:
      break;
    case Init::glorot:
      bound = std::sqrt(6.0 / static_cast<double>(shape.rows + shape.cols));
      break;
    case Init::embedding:
      bound = 0.05;
      break;
  }
  if (bound > 0.0) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : values) v = dist(rng);
  }
  return add(name, shape, std::move(values));
}

Parameter& ParameterStore::add(const std::string& name, Shape shape, std::vector<double> values) {
  if (index_.contains(name)) throw std::logic_error("duplicate parameter name: " + name);
  if (values.size() != shape.size())
    throw ShapeError("parameter " + name + ": " + std::to_string(values.size()) + " values for shape " + shape.str());
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->shape = shape;
  p->value = std::move(values);
  p->grad.assign(shape.size(), 0.0);
  p->adam_m.assign(shape.size(), 0.0);
  p->adam_v.assign(shape.size(), 0.0);
  index_.emplace(name, params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterStore::find(const std::string& name) noexcept {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParameterStore::find(const std::string& name) const noexcept {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

Parameter& ParameterStore::at(const std::string& name) {
  if (auto* p = find(name)) return *p;
  throw std::out_of_range("no parameter named " + name);
}

const Parameter& ParameterStore::at(const std::string& name) const {
  if (const auto* p = find(name)) return *p;
  throw std::out_of_range("no parameter named " + name);
}

std::size_t ParameterStore::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

std::vector<std::vector<double>> ParameterStore::snapshot() const {
  std::vector<std::vector<double>> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterStore::restore(const std::vector<std::vector<double>>& values) {
  if (values.size() != params_.size()) throw std::logic_error("restore: snapshot size mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (values[i].size() != params_[i]->value.size()) throw std::logic_error("restore: shape mismatch");
    params_[i]->value = values[i];
  }
}

void adam_step(ParameterStore& store, const AdamOptions& o) {
  const std::uint64_t t = store.adam_steps() + 1;
  store.set_adam_steps(t);
  const double correction1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
  for (std::size_t k = 0; k < store.size(); ++k) {
    Parameter& p = store[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      p.adam_m[i] = o.beta1 * p.adam_m[i] + (1.0 - o.beta1) * g;
      p.adam_v[i] = o.beta2 * p.adam_v[i] + (1.0 - o.beta2) * g * g;
      const double m_hat = p.adam_m[i] / correction1;
      const double v_hat = p.adam_v[i] / correction2;
      p.value[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
      p.grad[i] = 0.0;
    }
  }
}

namespace {

constexpr char kMagic[4] = {'E', 'F', 'D', 'P'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw FormatError("model file truncated at byte " + std::to_string(pos_));
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Entry {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

std::vector<Entry> read_entries(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a parameter file (bad magic header)");
  r.str(4);
  const std::uint32_t version = r.u32();
  if (version != kParamFormatVersion)
    throw FormatError("unsupported parameter file version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  std::vector<Entry> entries;
  for (std::uint32_t e = 0; e < count; ++e) {
    Entry entry;
    entry.name = r.str(r.u32());
    const std::uint32_t rank = r.u32();
    if (rank < 1 || rank > 2) throw FormatError("entry " + entry.name + ": unsupported rank " + std::to_string(rank));
    entry.shape.rows = r.u32();
    entry.shape.cols = rank == 2 ? r.u32() : 1;
    r.need(entry.shape.size() * 8);
    entry.values.resize(entry.shape.size());
    for (auto& v : entry.values) v = r.f64();
    entries.push_back(std::move(entry));
  }
  if (consumed) *consumed = r.pos();
  return entries;
}

}  // namespace

std::vector<std::uint8_t> save_params(const ParameterStore& store) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, kParamFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(store.size()));
  for (std::size_t k = 0; k < store.size(); ++k) {
    const Parameter& p = store[k];
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    const bool vec = p.shape.cols == 1;
    put_u32(out, vec ? 1 : 2);
    put_u32(out, static_cast<std::uint32_t>(p.shape.rows));
    if (!vec) put_u32(out, static_cast<std::uint32_t>(p.shape.cols));
    for (double v : p.value) put_f64(out, v);
  }
  return out;
}

ParameterStore load_params(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  ParameterStore store;
  for (auto& e : read_entries(bytes, consumed)) store.add(e.name, e.shape, std::move(e.values));
  return store;
}

void load_params_into(ParameterStore& store, std::span<const std::uint8_t> bytes, bool strict,
                      std::size_t* consumed) {
  auto entries = read_entries(bytes, consumed);
  if (strict && entries.size() != store.size())
    throw FormatError("parameter file has " + std::to_string(entries.size()) + " entries, model expects " +
                      std::to_string(store.size()));
  for (auto& e : entries) {
    Parameter* p = store.find(e.name);
    if (!p) {
      if (strict) throw FormatError("unknown parameter in file: " + e.name);
      continue;
    }
    if (p->shape != e.shape)
      throw FormatError("parameter " + e.name + " has shape " + e.shape.str() + " in file, model expects " +
                        p->shape.str());
    p->value = std::move(e.values);
  }
}

}  // namespace efdp
