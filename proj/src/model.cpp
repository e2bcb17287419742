#include "efdp/model.hpp"

#include <cstring>
#include <exception>
#include <fstream>
#include <iterator>
#include <sstream>

#include "efdp/error.hpp"
#include "efdp/keyvalue.hpp"

namespace efdp {

bool ModelConfig::set(const std::string& key, const std::string& value) {
  auto& r = repr;
  if (key == "word_dim") r.word_dim = kv::to_size(key, value);
  else if (key == "pos_dim") r.pos_dim = kv::to_size(key, value);
  else if (key == "char_dim") r.char_dim = kv::to_size(key, value);
  else if (key == "char_hidden") r.char_hidden = kv::to_size(key, value);
  else if (key == "char_layers") r.char_layers = kv::to_size(key, value);
  else if (key == "vprime_dim") r.vprime_dim = kv::to_size(key, value);
  else if (key == "lstm_hidden") r.lstm_hidden = kv::to_size(key, value);
  else if (key == "lstm_layers") r.lstm_layers = kv::to_size(key, value);
  else if (key == "use_char") r.use_char = kv::to_bool(key, value);
  else if (key == "use_pretrained") r.use_pretrained = kv::to_bool(key, value);
  else if (key == "word_dropout") r.word_dropout = kv::to_bool(key, value);
  else if (key == "dropout_alpha") r.dropout_alpha = kv::to_double(key, value);
  else if (key == "tree_hidden") tree_hidden = kv::to_size(key, value);
  else if (key == "relation_dim") relation_dim = kv::to_size(key, value);
  else if (key == "mlp_hidden") mlp_hidden = kv::to_size(key, value);
  else if (key == "seed") seed = kv::to_u64(key, value);
  else if (key == "pretrained") pretrained_path = value;
  else if (key == "pretrained_dim") pretrained_dim = kv::to_size(key, value);
  else return false;
  return true;
}

std::string ModelConfig::to_text() const {
  std::ostringstream o;
  o << "word_dim=" << repr.word_dim << '\n'
    << "pos_dim=" << repr.pos_dim << '\n'
    << "char_dim=" << repr.char_dim << '\n'
    << "char_hidden=" << repr.char_hidden << '\n'
    << "char_layers=" << repr.char_layers << '\n'
    << "vprime_dim=" << repr.vprime_dim << '\n'
    << "lstm_hidden=" << repr.lstm_hidden << '\n'
    << "lstm_layers=" << repr.lstm_layers << '\n'
    << "use_char=" << kv::format(repr.use_char) << '\n'
    << "use_pretrained=" << kv::format(repr.use_pretrained) << '\n'
    << "word_dropout=" << kv::format(repr.word_dropout) << '\n'
    << "dropout_alpha=" << kv::format(repr.dropout_alpha) << '\n'
    << "tree_hidden=" << tree_hidden << '\n'
    << "relation_dim=" << relation_dim << '\n'
    << "mlp_hidden=" << mlp_hidden << '\n'
    << "seed=" << seed << '\n'
    << "pretrained=" << pretrained_path << '\n'
    << "pretrained_dim=" << pretrained_dim << '\n';
  return o.str();
}

ModelConfig ModelConfig::from_text(std::string_view text) {
  ModelConfig c;
  for (const auto& [k, v] : kv::parse(text))
    if (!c.set(k, v)) throw FormatError("model config: unknown key '" + k + "'");
  return c;
}

namespace {

void check_dims(const ModelConfig& c) {
  const auto& r = c.repr;
  for (std::size_t d : {r.word_dim, r.pos_dim, r.vprime_dim, r.lstm_hidden, r.lstm_layers, c.tree_hidden,
                        c.relation_dim, c.mlp_hidden})
    if (d == 0) throw ConfigError("all model dimensions must be positive");
  if (r.use_char && (r.char_dim == 0 || r.char_hidden == 0 || r.char_layers == 0))
    throw ConfigError("character network dimensions must be positive");
}

}  // namespace

ParserModel::ParserModel(const ModelConfig& config, Vocab vocab, std::shared_ptr<const PretrainedTable> pretrained)
    : config_(config), vocab_(std::make_unique<Vocab>(std::move(vocab))), pretrained_(std::move(pretrained)) {
  check_dims(config_);
  if (vocab_->relation_count() == 0) throw ConfigError("vocabulary has no relations");
  if (config_.repr.use_pretrained) {
    if (!pretrained_) throw ConfigError("use_pretrained is set but no pretrained table was provided");
    if (config_.pretrained_dim != 0 && config_.pretrained_dim != pretrained_->dim())
      throw ConfigError("pretrained_dim=" + std::to_string(config_.pretrained_dim) + " but the table has dimension " +
                        std::to_string(pretrained_->dim()));
    config_.pretrained_dim = pretrained_->dim();
  } else {
    pretrained_.reset();
  }
  std::mt19937_64 rng(config_.seed);
  repr_ = std::make_unique<Representation>(store_, *vocab_, config_.repr, pretrained_, rng);
  encoder_ = TreeEncoder(store_, repr_->output_dim(), config_.tree_hidden, config_.relation_dim,
                         vocab_->relation_count(), rng);
  scoring_ = ScoringNet(store_, encoder_.encoding_dim(), config_.mlp_hidden, vocab_->relation_count(), rng);
}

std::vector<int> ParserModel::input_ids(const Sentence& s, std::mt19937_64* rng) const {
  return repr_->word_ids(s, rng);
}

Episode ParserModel::make_episode(Tape& tape, const Sentence& s, std::span<const int> ids) const {
  Episode ep;
  auto vectors = repr_->encode_sentence(tape, s, ids);
  ep.state.pending = init_pending(tape, encoder_, vectors);
  ep.state.relation_count = vocab_->relation_count();
  ep.scorer = std::make_unique<NeuralScorer>(scoring_, tape, vocab_->relation_count(), true);
  ep.encoder = &encoder_;
  return ep;
}

Episode ParserModel::begin(Tape& tape, const Sentence& s, std::span<const int> ids) {
  return make_episode(tape, s, ids);
}

std::vector<int> ParserModel::gold_relations(const Sentence& s) const {
  std::vector<int> rels;
  rels.reserve(s.size());
  for (const auto& t : s.tokens) rels.push_back(vocab_->relation_id(t.deprel));
  return rels;
}

ArcList ParserModel::parse(const Sentence& s, std::vector<TraceStep>* trace, bool incremental) const {
  Tape tape;
  auto ids = repr_->word_ids(s, nullptr);
  Episode ep = make_episode(tape, s, ids);
  if (!incremental) ep.scorer = std::make_unique<NeuralScorer>(scoring_, tape, vocab_->relation_count(), false);
  return greedy_parse(ep.state, *ep.scorer, vocab_->root_relation(), &encoder_, &tape, trace);
}

std::vector<ArcList> ParserModel::parse_all(const std::vector<Sentence>& sentences, int threads) const {
  std::vector<ArcList> out(sentences.size());
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
  const int workers = threads > 0 ? threads : 0;
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers != 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = parse(sentences[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<HeadLabel> ParserModel::to_head_labels(const ArcList& arcs, std::size_t n) const {
  std::vector<HeadLabel> out(n);
  for (const auto& a : arcs) {
    auto& hl = out.at(static_cast<std::size_t>(a.dependent - 1));
    hl.head = a.head;
    hl.deprel = a.relation >= 0 ? vocab_->relation(a.relation) : vocab_->root_label();
  }
  return out;
}

namespace {
constexpr char kMetaMagic[4] = {'E', 'F', 'D', 'M'};
const std::string kConfigMarker = "[config]\n";
const std::string kVocabMarker = "[vocab]\n";
}  // namespace

std::vector<std::uint8_t> ParserModel::serialize() const {
  auto bytes = save_params(store_);
  const std::string meta = kConfigMarker + config_.to_text() + kVocabMarker + vocab_->to_text();
  bytes.insert(bytes.end(), kMetaMagic, kMetaMagic + 4);
  const auto len = static_cast<std::uint32_t>(meta.size());
  for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  bytes.insert(bytes.end(), meta.begin(), meta.end());
  return bytes;
}

void ParserModel::save(const std::string& path) const {
  auto bytes = serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

namespace {

struct Metadata {
  ModelConfig config;
  std::string vocab_text;
};

Metadata read_metadata(std::span<const std::uint8_t> bytes) {
  std::size_t consumed = 0;
  (void)load_params(bytes, &consumed);
  auto rest = bytes.subspan(consumed);
  if (rest.size() < 8 || std::memcmp(rest.data(), kMetaMagic, 4) != 0)
    throw FormatError("model file has no metadata block");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(rest[4 + static_cast<std::size_t>(i)]) << (8 * i);
  if (rest.size() < 8 + static_cast<std::size_t>(len)) throw FormatError("model file metadata truncated");
  std::string meta(reinterpret_cast<const char*>(rest.data() + 8), len);
  if (meta.rfind(kConfigMarker, 0) != 0) throw FormatError("model file metadata malformed");
  auto vpos = meta.find(kVocabMarker);
  if (vpos == std::string::npos) throw FormatError("model file metadata has no vocabulary");
  Metadata m;
  m.config = ModelConfig::from_text(meta.substr(kConfigMarker.size(), vpos - kConfigMarker.size()));
  m.vocab_text = meta.substr(vpos + kVocabMarker.size());
  return m;
}

}  // namespace

std::unique_ptr<ParserModel> ParserModel::deserialize(std::span<const std::uint8_t> bytes,
                                                      std::shared_ptr<const PretrainedTable> pretrained) {
  Metadata m = read_metadata(bytes);
  auto model = std::make_unique<ParserModel>(m.config, Vocab::from_text(m.vocab_text), std::move(pretrained));
  load_params_into(model->store_, bytes, true);
  return model;
}

std::unique_ptr<ParserModel> ParserModel::load(const std::string& path, const std::string& pretrained_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::shared_ptr<const PretrainedTable> table;
  Metadata m = read_metadata(bytes);
  if (m.config.repr.use_pretrained) {
    const std::string& p = pretrained_override.empty() ? m.config.pretrained_path : pretrained_override;
    if (p.empty()) throw ConfigError("model uses pretrained embeddings but no path is known");
    table = std::make_shared<PretrainedTable>(load_pretrained(p));
  }
  return deserialize(bytes, std::move(table));
}

}  // namespace efdp
