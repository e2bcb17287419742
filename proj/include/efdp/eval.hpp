#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "efdp/conll.hpp"

namespace efdp {

struct RelationCounts {
  std::size_t total = 0;
  std::size_t head_correct = 0;
  std::size_t label_correct = 0;
};

struct EvalResult {
  double uas = 0.0;  // percent
  double las = 0.0;  // percent
  std::size_t total = 0;
  std::size_t head_correct = 0;
  std::size_t label_correct = 0;
  std::map<std::string, RelationCounts> per_relation;  // keyed by gold relation
};

struct EvalOptions {
  bool exclude_punct = false;
  std::set<std::string> punct_tags = {"CH", "PUNCT"};
};

// Attachment scores. Throws DataError when sentence or token counts differ.
EvalResult score(const std::vector<Sentence>& gold, const std::vector<std::vector<HeadLabel>>& predicted,
                 const EvalOptions& options = {});
// Predicted sentences as read back from a CoNLL file; forms must align.
EvalResult score(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted,
                 const EvalOptions& options = {});

// "UAS 80.00 LAS 60.00"
std::string format_scores(const EvalResult& r);

// One feature configuration of an ablation, scored under gold and/or
// automatically tagged POS input.
struct AblationRow {
  std::string config;
  std::optional<EvalResult> gold_pos;
  std::optional<EvalResult> auto_pos;
};

// Aligned plain-text table: one row per configuration, UAS/LAS under each
// POS condition ("-" when missing).
std::string ablation_report(const std::vector<AblationRow>& rows);
// One JSON object per line:
// {"config":..., "gold_pos":{"uas":..,"las":..,"tokens":..}|null, "auto_pos":...|null}
std::string ablation_json(const std::vector<AblationRow>& rows);

}  // namespace efdp
