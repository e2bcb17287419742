#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "efdp/eval.hpp"
#include "efdp/model.hpp"
#include "efdp/trainer.hpp"

namespace efdp::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2 };

// Everything a run needs. Populated from a key=value file, then the
// EFDP_SEED environment variable, then command-line overrides.
struct Config {
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string model_path;
  std::string log_path;  // empty = <model>.log
  ModelConfig model;
  TrainOptions training;
  std::size_t min_word_freq = 1;
  std::size_t test_size = 0;  // trailing training sentences held out for scoring
  EvalOptions eval;
  int threads = 0;  // parse workers, 0 = OpenMP default

  // Throws ConfigError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  // Checks numeric ranges; throws ConfigError.
  void validate() const;
};

// Runs the command line in-process. Errors are reported on `err` and
// mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace efdp::cli
