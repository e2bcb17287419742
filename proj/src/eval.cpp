#include "efdp/eval.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "efdp/error.hpp"

namespace efdp {

EvalResult score(const std::vector<Sentence>& gold, const std::vector<std::vector<HeadLabel>>& predicted,
                 const EvalOptions& options) {
  if (gold.size() != predicted.size())
    throw DataError("evaluation: " + std::to_string(gold.size()) + " gold sentences but " +
                    std::to_string(predicted.size()) + " predicted");
  EvalResult r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw DataError("evaluation: sentence " + std::to_string(s + 1) + " has " + std::to_string(gold[s].size()) +
                      " gold tokens but " + std::to_string(predicted[s].size()) + " predicted");
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const Token& t = gold[s].tokens[i];
      if (options.exclude_punct && options.punct_tags.contains(t.pos)) continue;
      const HeadLabel& p = predicted[s][i];
      auto& rel = r.per_relation[t.deprel];
      ++r.total;
      ++rel.total;
      if (p.head == t.head) {
        ++r.head_correct;
        ++rel.head_correct;
        if (p.deprel == t.deprel) {
          ++r.label_correct;
          ++rel.label_correct;
        }
      }
    }
  }
  if (r.total > 0) {
    r.uas = 100.0 * static_cast<double>(r.head_correct) / static_cast<double>(r.total);
    r.las = 100.0 * static_cast<double>(r.label_correct) / static_cast<double>(r.total);
  }
  return r;
}

EvalResult score(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted,
                 const EvalOptions& options) {
  if (gold.size() != predicted.size())
    throw DataError("evaluation: " + std::to_string(gold.size()) + " gold sentences but " +
                    std::to_string(predicted.size()) + " predicted");
  std::vector<std::vector<HeadLabel>> pred(predicted.size());
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw DataError("evaluation: sentence " + std::to_string(s + 1) + " differs in length (" +
                      std::to_string(gold[s].size()) + " vs " + std::to_string(predicted[s].size()) + " tokens)");
    for (std::size_t i = 0; i < predicted[s].size(); ++i) {
      const Token& t = predicted[s].tokens[i];
      if (t.form != gold[s].tokens[i].form)
        throw DataError("evaluation: sentence " + std::to_string(s + 1) + " token " + std::to_string(i + 1) +
                        " form '" + t.form + "' does not match gold '" + gold[s].tokens[i].form + "'");
      pred[s].push_back(HeadLabel{t.head, t.deprel});
    }
  }
  return score(gold, pred, options);
}

std::string format_scores(const EvalResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "UAS %.2f LAS %.2f", r.uas, r.las);
  return buf;
}

namespace {
std::string cell(const std::optional<EvalResult>& r, bool uas) {
  if (!r) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", uas ? r->uas : r->las);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}
}  // namespace

std::string ablation_report(const std::vector<AblationRow>& rows) {
  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.config.size());
  std::ostringstream o;
  o << pad("Model", w) << "  " << pad("Gold POS", 15) << "  Auto POS\n";
  o << pad("", w) << "  " << pad("UAS%", 7) << " " << pad("LAS%", 7) << "  " << pad("UAS%", 7) << " LAS%\n";
  for (const auto& r : rows) {
    o << pad(r.config, w) << "  " << pad(cell(r.gold_pos, true), 7) << " " << pad(cell(r.gold_pos, false), 7) << "  "
      << pad(cell(r.auto_pos, true), 7) << " " << cell(r.auto_pos, false) << '\n';
  }
  return o.str();
}

std::string ablation_json(const std::vector<AblationRow>& rows) {
  auto encode = [](const std::optional<EvalResult>& r) -> nlohmann::json {
    if (!r) return nullptr;
    return {{"uas", r->uas}, {"las", r->las}, {"tokens", r->total}};
  };
  std::string out;
  for (const auto& r : rows) {
    nlohmann::json j = {{"config", r.config}, {"gold_pos", encode(r.gold_pos)}, {"auto_pos", encode(r.auto_pos)}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace efdp
