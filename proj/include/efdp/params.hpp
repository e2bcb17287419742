#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace efdp {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t size() const noexcept { return rows * cols; }
  bool is_vector() const noexcept { return cols == 1; }
  std::string str() const { return "(" + std::to_string(rows) + "," + std::to_string(cols) + ")"; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// A trainable tensor with its gradient accumulator and Adam moments.
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
};

enum class Init {
  zeros,
  glorot,     // uniform in +-sqrt(6 / (rows + cols))
  embedding,  // uniform in +-0.05
};

// Owns every trainable parameter. Names are unique; insertion order is kept
// and defines the serialization order. Parameter addresses are stable.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  Parameter& add(const std::string& name, Shape shape, Init init, std::mt19937_64& rng);
  Parameter& add(const std::string& name, Shape shape, std::vector<double> values);

  Parameter* find(const std::string& name) noexcept;
  const Parameter* find(const std::string& name) const noexcept;
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const noexcept;
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  void zero_grad();
  std::uint64_t adam_steps() const noexcept { return adam_steps_; }
  void set_adam_steps(std::uint64_t steps) noexcept { adam_steps_ = steps; }

  // Copies of all parameter values, in store order.
  std::vector<std::vector<double>> snapshot() const;
  void restore(const std::vector<std::vector<double>>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t adam_steps_ = 0;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update over every parameter, then zeroes gradients.
void adam_step(ParameterStore& store, const AdamOptions& options = {});

// Binary format: "EFDP", u32 version, u32 entry count, then per entry
// u32 name length, UTF-8 name, u32 rank, u32 dims[rank], f64 values; all
// integers and floats little-endian.
inline constexpr std::uint32_t kParamFormatVersion = 1;

std::vector<std::uint8_t> save_params(const ParameterStore& store);

// Builds a fresh store from serialized bytes. `consumed`, when given,
// receives the number of bytes read (the format is self-delimiting).
ParameterStore load_params(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);

// Overwrites values of an existing store. Strict mode requires the file to
// hold exactly the store's parameter names with matching shapes.
void load_params_into(ParameterStore& store, std::span<const std::uint8_t> bytes, bool strict = true,
                      std::size_t* consumed = nullptr);

}  // namespace efdp
