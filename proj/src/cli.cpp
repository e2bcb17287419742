#include "efdp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "efdp/conll.hpp"
#include "efdp/error.hpp"
#include "efdp/kernels.hpp"
#include "efdp/keyvalue.hpp"

namespace efdp::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void require_file(const std::string& what, const std::string& path) {
  if (path.empty()) throw ConfigError(what + " path is not set");
  if (!fs::is_regular_file(path)) throw ConfigError(what + " file not found: " + path);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  if (key == "train") train_path = value;
  else if (key == "dev") dev_path = value;
  else if (key == "test") test_path = value;
  else if (key == "model") model_path = value;
  else if (key == "log") log_path = value;
  else if (key == "seed") {
    model.seed = kv::to_u64(key, value);
    training.seed = model.seed;
  } else if (key == "lr") training.adam.lr = kv::to_double(key, value);
  else if (key == "beta1") training.adam.beta1 = kv::to_double(key, value);
  else if (key == "beta2") training.adam.beta2 = kv::to_double(key, value);
  else if (key == "eps") training.adam.eps = kv::to_double(key, value);
  else if (key == "epochs") training.epochs = kv::to_size(key, value);
  else if (key == "error_threshold") training.error_threshold = kv::to_size(key, value);
  else if (key == "stop_at_dev_score") training.stop_at_dev_score = kv::to_double(key, value);
  else if (key == "exploration") training.exploration = kv::to_bool(key, value);
  else if (key == "shuffle") training.shuffle = kv::to_bool(key, value);
  else if (key == "min_word_freq") min_word_freq = kv::to_size(key, value);
  else if (key == "test_size") test_size = kv::to_size(key, value);
  else if (key == "exclude_punct") eval.exclude_punct = kv::to_bool(key, value);
  else if (key == "punct_tags") {
    auto tags = split_list(value);
    eval.punct_tags = {tags.begin(), tags.end()};
  } else if (key == "threads") threads = static_cast<int>(kv::to_size(key, value));
  else if (key == "kernels") {
    if (value == "serial") kernels::set_mode(kernels::Mode::serial);
    else if (value == "parallel") kernels::set_mode(kernels::Mode::parallel);
    else if (value == "auto") kernels::set_mode(kernels::Mode::automatic);
    else throw ConfigError("kernels: expected serial, parallel or auto, got '" + value + "'");
  } else if (!model.set(key, value)) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  for (const auto& [k, v] : kv::parse(ss.str())) set(k, v);
}

void Config::validate() const {
  if (training.error_threshold < 1) throw ConfigError("error_threshold must be at least 1");
  if (training.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(training.adam.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(training.adam.eps > 0.0)) throw ConfigError("eps must be positive");
  for (double b : {training.adam.beta1, training.adam.beta2})
    if (!(b >= 0.0 && b < 1.0)) throw ConfigError("beta1 and beta2 must lie in [0, 1)");
  if (min_word_freq < 1) throw ConfigError("min_word_freq must be at least 1");
  if (!(model.repr.dropout_alpha > 0.0)) throw ConfigError("dropout_alpha must be positive");
}

namespace {

// Copies everything written to it into two streams.
class TeeBuf : public std::streambuf {
 public:
  TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

 protected:
  int overflow(int c) override {
    if (c == EOF) return !EOF;
    const bool ok = (!a_ || a_->sputc(char(c)) != EOF) && (!b_ || b_->sputc(char(c)) != EOF);
    return ok ? c : EOF;
  }
  int sync() override {
    const int ra = a_ ? a_->pubsync() : 0;
    const int rb = b_ ? b_->pubsync() : 0;
    return ra == 0 && rb == 0 ? 0 : -1;
  }

 private:
  std::streambuf* a_;
  std::streambuf* b_;
};

std::vector<std::vector<HeadLabel>> predict(const ParserModel& model, const std::vector<Sentence>& sentences,
                                            int threads) {
  auto arcs = model.parse_all(sentences, threads);
  std::vector<std::vector<HeadLabel>> out;
  out.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) out.push_back(model.to_head_labels(arcs[i], sentences[i].size()));
  return out;
}

std::shared_ptr<const PretrainedTable> pretrained_for(const Config& cfg) {
  if (!cfg.model.repr.use_pretrained) return nullptr;
  require_file("pretrained", cfg.model.pretrained_path);
  auto table = std::make_shared<PretrainedTable>(load_pretrained(cfg.model.pretrained_path));
  if (cfg.model.pretrained_dim != 0 && cfg.model.pretrained_dim != table->dim())
    throw ConfigError("pretrained_dim=" + std::to_string(cfg.model.pretrained_dim) + " but " +
                      cfg.model.pretrained_path + " has dimension " + std::to_string(table->dim()));
  return table;
}

int cmd_train(const Config& cfg, std::ostream& out, std::ostream& err) {
  require_file("train", cfg.train_path);
  if (cfg.model_path.empty()) throw ConfigError("model path is not set");
  if (!cfg.dev_path.empty()) require_file("dev", cfg.dev_path);
  if (!cfg.test_path.empty()) require_file("test", cfg.test_path);
  auto table = pretrained_for(cfg);

  auto corpus = read_conll_file(cfg.train_path);
  TreebankSplit split = split_train_test(corpus, cfg.test_size);
  std::vector<Sentence> dev;
  if (!cfg.dev_path.empty()) dev = read_conll_file(cfg.dev_path);
  std::vector<Sentence> test;
  if (!cfg.test_path.empty()) test = read_conll_file(cfg.test_path);

  ParserModel model(cfg.model, Vocab::build(split.train, cfg.min_word_freq), table);
  if (table) {
    std::vector<std::string> words;
    for (const auto& s : split.train)
      for (const auto& t : s.tokens) words.push_back(t.form);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * table->coverage(words));
    err << "pretrained coverage of training words: " << buf << "%\n";
  }

  const std::string log_path = cfg.log_path.empty() ? cfg.model_path + ".log" : cfg.log_path;
  std::ofstream log_file(log_path);
  if (!log_file) throw DataError("cannot write log file " + log_path);
  TeeBuf tee(log_file.rdbuf(), err.rdbuf());
  std::ostream log(&tee);

  DevEvaluator evaluator;
  if (!dev.empty()) {
    evaluator = [&] {
      auto r = score(dev, predict(model, dev, cfg.threads), cfg.eval);
      return std::pair{r.uas, r.las};
    };
  }
  auto result = train(split.train, model, cfg.training, evaluator, &log);
  if (result.best_epoch) log << "best epoch " << *result.best_epoch << '\n';
  model.save(cfg.model_path);
  log << "saved model " << cfg.model_path << '\n';
  auto report = [&](const char* what, const std::vector<Sentence>& sentences) {
    auto r = score(sentences, predict(model, sentences, cfg.threads), cfg.eval);
    log << what << ' ' << sentences.size() << " sentences " << format_scores(r) << '\n';
    out << what << ' ' << format_scores(r) << '\n';
  };
  if (!split.test.empty()) report("held-out", split.test);
  if (!test.empty()) report("test", test);
  log.flush();
  return kOk;
}

std::unique_ptr<ParserModel> load_model(const Config& cfg) {
  require_file("model", cfg.model_path);
  std::string override_path;
  if (!cfg.model.pretrained_path.empty()) {
    require_file("pretrained", cfg.model.pretrained_path);
    override_path = cfg.model.pretrained_path;
  }
  return ParserModel::load(cfg.model_path, override_path);
}

int cmd_parse(const Config& cfg, const std::string& input, const std::string& output, std::ostream& out) {
  require_file("input", input);
  auto model = load_model(cfg);
  auto sentences = read_conll_file(input, ConllMode::raw);
  auto predicted = predict(*model, sentences, cfg.threads);
  if (output.empty() || output == "-") {
    out << write_conll(sentences, &predicted);
  } else {
    write_conll_file(output, sentences, &predicted);
  }
  return kOk;
}

void print_per_relation(const EvalResult& r, std::ostream& out) {
  for (const auto& [rel, c] : r.per_relation) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %6zu  UAS %6.2f  LAS %6.2f", rel.c_str(), c.total,
                  c.total ? 100.0 * double(c.head_correct) / double(c.total) : 0.0,
                  c.total ? 100.0 * double(c.label_correct) / double(c.total) : 0.0);
    out << buf << '\n';
  }
}

// Ablation directory layout: gold.conll plus <config>.gold_pos.conll and/or
// <config>.auto_pos.conll for each configuration.
std::vector<AblationRow> load_ablation(const std::string& dir, const std::string& gold_path, const EvalOptions& opt) {
  if (!fs::is_directory(dir)) throw ConfigError("ablation directory not found: " + dir);
  const std::string gold_file = gold_path.empty() ? (fs::path(dir) / "gold.conll").string() : gold_path;
  require_file("gold", gold_file);
  auto gold = read_conll_file(gold_file);
  std::map<std::string, AblationRow> rows;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    for (const std::string suffix : {".gold_pos.conll", ".auto_pos.conll"}) {
      if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
        continue;
      const std::string config = name.substr(0, name.size() - suffix.size());
      auto predicted = read_conll_file(path.string(), ConllMode::loose);
      auto r = score(gold, predicted, opt);
      auto& row = rows[config];
      row.config = config;
      (suffix == ".gold_pos.conll" ? row.gold_pos : row.auto_pos) = r;
    }
  }
  const std::vector<std::string> canonical = {"base", "+char", "+pretrained", "+both"};
  std::vector<AblationRow> ordered;
  for (const auto& c : canonical) {
    auto it = rows.find(c);
    if (it != rows.end()) {
      ordered.push_back(it->second);
      rows.erase(it);
    }
  }
  for (auto& [k, row] : rows) ordered.push_back(row);
  return ordered;
}

int cmd_eval(const Config& cfg, const std::string& gold_path, const std::string& predicted_path,
             const std::string& ablation_dir, bool json, bool per_relation, std::ostream& out) {
  if (!ablation_dir.empty()) {
    auto rows = load_ablation(ablation_dir, gold_path, cfg.eval);
    out << (json ? ablation_json(rows) : ablation_report(rows));
    return kOk;
  }
  require_file("gold", gold_path);
  require_file("predicted", predicted_path);
  auto gold = read_conll_file(gold_path);
  auto predicted = read_conll_file(predicted_path, ConllMode::loose);
  auto r = score(gold, predicted, cfg.eval);
  out << format_scores(r) << '\n';
  if (per_relation) print_per_relation(r, out);
  return kOk;
}

struct ScriptStep {
  Direction direction;
  std::size_t position;
  std::string relation;
};

// "LEFT:4:nmod,RIGHT:2:dobj" (positions 1-based in the pending list).
std::vector<ScriptStep> parse_script(const std::string& text) {
  std::vector<ScriptStep> steps;
  for (const auto& item : split_list(text)) {
    std::vector<std::string> parts;
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("script step '" + item + "': expected DIRECTION:POSITION:RELATION");
    ScriptStep st;
    if (parts[0] == "LEFT") st.direction = Direction::left;
    else if (parts[0] == "RIGHT") st.direction = Direction::right;
    else throw ConfigError("script step '" + item + "': direction must be LEFT or RIGHT");
    st.position = kv::to_size("script position", parts[1]);
    st.relation = parts[2];
    steps.push_back(st);
  }
  return steps;
}

// Scores the scripted action 1 and everything else 0.
class ScriptedScorer : public ActionScorer {
 public:
  ScriptedScorer(std::vector<ScriptStep> steps, const std::vector<std::string>& relations)
      : steps_(std::move(steps)), relations_(relations) {}

  std::vector<Action> score(const ParseState& state) override {
    if (next_ >= steps_.size())
      throw ConfigError("script has " + std::to_string(steps_.size()) + " steps but the sentence needs more");
    const ScriptStep& st = steps_[next_++];
    if (st.position < 1 || st.position >= state.pending.size())
      throw ConfigError("script step " + std::to_string(next_) + ": position " + std::to_string(st.position) +
                        " outside 1.." + std::to_string(state.pending.size() - 1));
    const auto rel = std::find(relations_.begin(), relations_.end(), st.relation) - relations_.begin();
    auto actions = enumerate_actions(state.pending.size(), relations_.size());
    for (auto& a : actions)
      a.score = (a.position == st.position && a.direction == st.direction && a.relation == rel) ? 1.0 : 0.0;
    return actions;
  }
  std::size_t consumed() const noexcept { return next_; }

 private:
  std::vector<ScriptStep> steps_;
  std::vector<std::string> relations_;
  std::size_t next_ = 0;
};

void print_trace(const Sentence& s, const std::vector<TraceStep>& trace, const ArcList& arcs,
                 const std::vector<std::string>& relations, const std::string& root_label, std::ostream& out) {
  out << "sentence";
  for (const auto& t : s.tokens) out << ' ' << t.form;
  out << '\n';
  auto rel_name = [&](int r) { return r >= 0 ? relations.at(static_cast<std::size_t>(r)) : root_label; };
  for (const auto& st : trace) {
    char score[64];
    std::snprintf(score, sizeof score, "%.6f", st.action.score);
    out << "step " << st.step << ' ' << to_string(st.action.direction) << '(' << st.action.position << ','
        << rel_name(st.action.relation) << ") head=" << s.tokens[static_cast<std::size_t>(st.arc.head - 1)].form
        << " dependent=" << s.tokens[static_cast<std::size_t>(st.arc.dependent - 1)].form << " score=" << score
        << '\n';
  }
  std::vector<std::string> labels(s.size());
  auto heads = heads_of(arcs, s.size());
  for (const auto& a : arcs) labels[static_cast<std::size_t>(a.dependent - 1)] = rel_name(a.relation);
  out << "heads";
  for (int h : heads) out << ' ' << h;
  out << "\nrelations";
  for (const auto& l : labels) out << ' ' << l;
  out << '\n';
}

int cmd_trace(const Config& cfg, const std::string& input, std::size_t index, const std::string& script,
              const std::string& root_label, std::ostream& out) {
  require_file("input", input);
  auto sentences = read_conll_file(input, ConllMode::raw);
  if (index < 1 || index > sentences.size())
    throw ConfigError("sentence " + std::to_string(index) + " not in " + input + " (" +
                      std::to_string(sentences.size()) + " sentences)");
  const Sentence& s = sentences[index - 1];
  std::vector<TraceStep> trace;
  if (!script.empty()) {
    auto steps = parse_script(script);
    std::vector<std::string> relations;
    for (const auto& st : steps)
      if (std::find(relations.begin(), relations.end(), st.relation) == relations.end())
        relations.push_back(st.relation);
    if (relations.empty()) relations.push_back(root_label);
    ScriptedScorer scorer(steps, relations);
    ParseState state;
    state.pending = init_pending(s.size());
    state.relation_count = relations.size();
    auto arcs = greedy_parse(state, scorer, -1, nullptr, nullptr, &trace);
    if (scorer.consumed() != steps.size())
      throw ConfigError("script has " + std::to_string(steps.size()) + " steps but the sentence needs " +
                        std::to_string(scorer.consumed()));
    print_trace(s, trace, arcs, relations, root_label, out);
    return kOk;
  }
  auto model = load_model(cfg);
  auto arcs = model->parse(s, &trace);
  const auto& v = model->vocab();
  std::vector<std::string> relations;
  for (std::size_t r = 0; r < v.relation_count(); ++r) relations.push_back(v.relation(static_cast<int>(r)));
  print_trace(s, trace, arcs, relations, v.root_label(), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural easy-first dependency parser", "efdp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "efdp 1.0");

  std::string config_file;
  std::vector<std::string> overrides;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "key=value configuration file");
    sub->add_option("-s,--set", overrides, "override one configuration key (key=value)")->allow_extra_args(false);
  };

  std::string train_path, dev_path, test_path, model_path, input, output, gold, predicted, ablation, script;
  std::string root_label = "root";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<int> threads;
  std::size_t sentence_index = 1;
  bool json = false, per_relation = false, exclude_punct = false;

  auto* train_cmd = app.add_subcommand("train", "train a model and write it to --model");
  common(train_cmd);
  train_cmd->add_option("--train", train_path, "training treebank (CoNLL-X)");
  train_cmd->add_option("--dev", dev_path, "development treebank for model selection");
  train_cmd->add_option("--test", test_path, "test treebank scored after training");
  train_cmd->add_option("-m,--model", model_path, "output model file");
  train_cmd->add_option("--epochs", epochs, "number of epochs");
  train_cmd->add_option("--seed", seed, "random seed");

  auto* parse_cmd = app.add_subcommand("parse", "parse a CoNLL-X file; gold HEAD/DEPREL are ignored");
  common(parse_cmd);
  parse_cmd->add_option("-m,--model", model_path, "model file");
  parse_cmd->add_option("-i,--input", input, "input CoNLL-X file")->required();
  parse_cmd->add_option("-o,--output", output, "output file (default: standard output)");
  parse_cmd->add_option("-t,--threads", threads, "worker threads (0 = all cores)");

  auto* eval_cmd = app.add_subcommand("eval", "score predicted trees against gold trees");
  common(eval_cmd);
  eval_cmd->add_option("-g,--gold", gold, "gold CoNLL-X file");
  eval_cmd->add_option("-p,--predicted", predicted, "predicted CoNLL-X file");
  eval_cmd->add_option("--ablation", ablation, "directory of <config>.{gold,auto}_pos.conll files");
  eval_cmd->add_flag("--json", json, "ablation rows as JSON lines");
  eval_cmd->add_flag("--per-relation", per_relation, "also print scores per gold relation");
  eval_cmd->add_flag("--exclude-punct", exclude_punct, "skip tokens whose POS is in punct_tags");

  auto* trace_cmd = app.add_subcommand("trace", "print the action sequence for one sentence");
  common(trace_cmd);
  trace_cmd->add_option("-m,--model", model_path, "model file");
  trace_cmd->add_option("-i,--input", input, "input CoNLL-X file")->required();
  trace_cmd->add_option("-n,--sentence", sentence_index, "1-based sentence number");
  trace_cmd->add_option("--script", script, "forced actions, e.g. LEFT:4:nmod,RIGHT:2:dobj");
  trace_cmd->add_option("--root-label", root_label, "label of the root arc in scripted traces");

  std::vector<const char*> argv{"efdp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    Config cfg;
    if (!config_file.empty()) cfg.load_file(config_file);
    if (const char* env = std::getenv("EFDP_SEED"); env && *env) cfg.set("seed", env);
    for (const auto& o : overrides) {
      auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
      cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (!train_path.empty()) cfg.train_path = train_path;
    if (!dev_path.empty()) cfg.dev_path = dev_path;
    if (!test_path.empty()) cfg.test_path = test_path;
    if (!model_path.empty()) cfg.model_path = model_path;
    if (seed) cfg.set("seed", std::to_string(*seed));
    if (epochs) cfg.training.epochs = *epochs;
    if (threads) cfg.threads = *threads;
    if (exclude_punct) cfg.eval.exclude_punct = true;
    cfg.validate();

    if (*train_cmd) return cmd_train(cfg, out, err);
    if (*parse_cmd) return cmd_parse(cfg, input, output, out);
    if (*eval_cmd) {
      if (ablation.empty() && (gold.empty() || predicted.empty()))
        throw ConfigError("eval needs --gold and --predicted, or --ablation");
      return cmd_eval(cfg, gold, predicted, ablation, json, per_relation, out);
    }
    if (*trace_cmd) {
      if (script.empty() && cfg.model_path.empty()) throw ConfigError("trace needs --model or --script");
      return cmd_trace(cfg, input, sentence_index, script, root_label, out);
    }
  } catch (const ConfigError& e) {
    err << "efdp: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "efdp: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "efdp: numeric error: " << e.what() << '\n';
    return kDataError;
  }
  return kConfigError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace efdp::cli
