#include "msgclass/features.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "msgclass/error.hpp"
#include "msgclass/unicode.hpp"

namespace msgclass {

namespace {

const LexiconSet& empty_lexicons() {
  static const LexiconSet empty;
  return empty;
}

const LexiconSet& lexicons_or_empty(const std::shared_ptr<const LexiconSet>& p) { return p ? *p : empty_lexicons(); }

std::vector<TemporalFeatures> temporal_for_slice(const Corpus& slice, const Corpus& context, int window) {
  std::vector<TemporalFeatures> table(context.size());
  for (const auto& stream : partition_streams(context))
    for (std::size_t p = 0; p < stream.indices.size(); ++p)
      table[stream.indices[p]] = temporal_features(context, stream, p, window);
  std::vector<TemporalFeatures> out;
  out.reserve(slice.size());
  for (const auto& m : slice.messages()) {
    auto idx = context.find(m.id);
    if (!idx) throw DataError("message " + m.id + " is missing from the temporal context corpus");
    out.push_back(table[*idx]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::General: return "general";
    case Subset::Lexicon: return "lexicon";
    case Subset::Bow: return "bow";
    case Subset::Pos: return "pos";
    case Subset::Temporal: return "temporal";
  }
  return "?";
}

Subset parse_subset(std::string_view name) {
  for (Subset s : kAllSubsets)
    if (to_string(s) == name) return s;
  throw ConfigError("unknown feature subset '" + std::string(name) + "'");
}

std::vector<Subset> canonical_subsets(std::vector<Subset> selection) {
  std::sort(selection.begin(), selection.end());
  selection.erase(std::unique(selection.begin(), selection.end()), selection.end());
  return selection;
}

const SubsetRange* FeatureMatrix::find(Subset s) const {
  for (const auto& r : subsets)
    if (r.subset == s) return &r;
  return nullptr;
}

// ---------------------------------------------------------------- general

std::array<double, 10> general_features(std::string_view text) {
  std::array<double, 10> f{};
  const auto tokens = tokenize(text);
  double words = 0, max_len = 0, min_len = 0, total_len = 0, punct = 0;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Punct) {
      ++punct;
      continue;
    }
    if (t.kind != TokenKind::Word) continue;
    const auto cps = unicode::decode(t.text);
    const double len = static_cast<double>(cps.size());
    for (const auto& cp : cps)
      if (unicode::is_punct(cp.value)) ++punct;
    min_len = words == 0 ? len : std::min(min_len, len);
    max_len = std::max(max_len, len);
    total_len += len;
    ++words;
  }
  double digits = 0, capitals = 0, repeats = 0;
  char32_t prev = 0;
  bool have_prev = false;
  char32_t first = 0, last = 0;
  bool any = false;
  for (const auto& cp : unicode::decode(text)) {
    const char32_t c = cp.value;
    if (unicode::is_digit(c)) ++digits;
    if (unicode::is_upper(c)) ++capitals;
    if (unicode::is_space(c)) {
      have_prev = false;
      continue;
    }
    if (have_prev && c == prev) ++repeats;
    prev = c;
    have_prev = true;
    if (!any) first = c;
    last = c;
    any = true;
  }
  f[0] = words;
  f[1] = max_len;
  f[2] = min_len;
  f[3] = words > 0 ? total_len / words : 0.0;
  f[4] = digits;
  f[5] = punct;
  f[6] = capitals;
  f[7] = repeats;
  f[8] = any && unicode::is_upper(first) ? 1.0 : 0.0;
  f[9] = any && last == U'.' ? 1.0 : 0.0;
  return f;
}

// ---------------------------------------------------------------- lexicon

std::array<double, 10> lexicon_features(std::string_view text, const LexiconSet& lex) {
  const std::array<const std::unordered_set<std::string>*, 5> lists = {
      &lex.curse_words, &lex.given_names, &lex.chat_usernames, &lex.book_names, &lex.key_lemmas};
  std::array<double, 5> counts{};
  for (const auto& tok : tokenize(text)) {
    if (tok.kind != TokenKind::Word) continue;
    const std::string raw = unicode::to_lower(tok.text);
    const auto norm = normalize(tok.text, lex, NormalizeStages::pos());
    for (std::size_t l = 0; l < lists.size(); ++l) {
      const auto& set = *lists[l];
      bool hit = set.count(raw) > 0;
      for (const auto& n : norm) {
        if (hit) break;
        hit = set.count(n) > 0 || (l == 4 && set.count(lex.lemma(n)) > 0);
      }
      if (hit) counts[l] += 1;
    }
  }
  std::array<double, 10> f{};
  for (std::size_t l = 0; l < 5; ++l) {
    f[2 * l] = counts[l];
    f[2 * l + 1] = counts[l] > 0 ? 1.0 : 0.0;
  }
  return f;
}

// ---------------------------------------------------------------- bow

std::optional<std::size_t> BowVocab::index_of(std::string_view term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - terms.begin());
}

std::vector<std::string> bow_terms(const std::vector<std::string>& tokens) {
  std::vector<std::string> out(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back(tokens[i] + " " + tokens[i + 1]);
  return out;
}

BowVocab fit_bow(const std::vector<std::vector<std::string>>& documents, int min_df, bool tfidf) {
  std::map<std::string, int> df;
  for (const auto& doc : documents) {
    auto terms = bow_terms(doc);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms) ++df[t];
  }
  BowVocab vocab;
  vocab.min_df = min_df;
  vocab.documents = documents.size();
  vocab.tfidf = tfidf;
  for (const auto& [term, count] : df) {
    if (count < min_df) continue;
    vocab.terms.push_back(term);
    vocab.document_frequency.push_back(count);
  }
  return vocab;
}

Vector bow_features(const std::vector<std::string>& tokens, const BowVocab& vocab) {
  Vector v = Vector::Zero(static_cast<Index>(vocab.terms.size()));
  for (const auto& t : bow_terms(tokens))
    if (auto i = vocab.index_of(t)) v(static_cast<Index>(*i)) += 1.0;
  if (vocab.tfidf) {
    const double n = static_cast<double>(vocab.documents);
    for (Index i = 0; i < v.size(); ++i)
      if (v(i) != 0.0) v(i) *= std::log((1.0 + n) / (1.0 + vocab.document_frequency[i])) + 1.0;
  }
  return v;
}

// ---------------------------------------------------------------- pos

std::optional<std::size_t> PosVocab::index_of(const PosTag& tag) const {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), tag);
  if (it == pairs.end() || !(*it == tag)) return std::nullopt;
  return static_cast<std::size_t>(it - pairs.begin());
}

PosVocab fit_pos_vocab(const std::vector<std::vector<PosTag>>& tagged_documents) {
  PosVocab vocab;
  for (const auto& doc : tagged_documents) vocab.pairs.insert(vocab.pairs.end(), doc.begin(), doc.end());
  std::sort(vocab.pairs.begin(), vocab.pairs.end());
  vocab.pairs.erase(std::unique(vocab.pairs.begin(), vocab.pairs.end()), vocab.pairs.end());
  return vocab;
}

Vector pos_features(const std::vector<PosTag>& tags, const PosVocab& vocab) {
  Vector v = Vector::Zero(static_cast<Index>(vocab.pairs.size()));
  for (const auto& t : tags)
    if (auto i = vocab.index_of(t)) v(static_cast<Index>(*i)) += 1.0;
  return v;
}

// ---------------------------------------------------------------- temporal

TemporalFeatures temporal_features(const Corpus& corpus, const Stream& stream, std::size_t position, int window) {
  const auto& user = corpus[stream.indices.at(position)].user_id;
  TemporalFeatures f;
  for (std::size_t p = position; p > 0 && corpus[stream.indices[p - 1]].user_id == user; --p) ++f.consecutive_posts;
  const std::size_t from = position > static_cast<std::size_t>(window) ? position - window : 0;
  for (std::size_t p = from; p < position; ++p)
    if (corpus[stream.indices[p]].user_id == user) ++f.window_share;
  return f;
}

// ---------------------------------------------------------------- assembly

PreparedMessage prepare_message(const Message& message, const LexiconSet& lexicons) {
  PreparedMessage p;
  p.general = general_features(message.text);
  p.lexicon = lexicon_features(message.text, lexicons);
  p.bow_tokens = normalize(message.text, lexicons, NormalizeStages::bow());
  p.tags = message.pos_tags ? parse_pos_column(*message.pos_tags)
                            : pos_tag(normalize(message.text, lexicons, NormalizeStages::pos()), lexicons);
  return p;
}

std::vector<std::string> feature_columns(const Featurizer& f) {
  std::vector<std::string> cols;
  for (Subset s : canonical_subsets(f.config.subsets)) {
    switch (s) {
      case Subset::General:
        for (auto n : kGeneralFeatureNames) cols.push_back("general:" + std::string(n));
        break;
      case Subset::Lexicon:
        for (auto n : kLexiconLists) {
          cols.push_back("lexicon:" + std::string(n) + "_count");
          cols.push_back("lexicon:" + std::string(n) + "_present");
        }
        break;
      case Subset::Bow:
        if (f.bow)
          for (const auto& t : f.bow->terms) cols.push_back("bow:" + t);
        break;
      case Subset::Pos:
        if (f.pos)
          for (const auto& t : f.pos->pairs) cols.push_back("pos:" + to_string(t));
        break;
      case Subset::Temporal:
        cols.push_back("temporal:consecutive_posts");
        cols.push_back("temporal:window_share");
        break;
    }
  }
  return cols;
}

FeatureMatrix assemble(const std::vector<PreparedMessage>& prepared, std::span<const TemporalFeatures> temporal,
                       const Featurizer& fitted) {
  const auto subsets = canonical_subsets(fitted.config.subsets);
  for (Subset s : subsets) {
    if (s == Subset::Bow && !fitted.bow) throw ConfigError("subset 'bow' selected but no vocabulary was fitted");
    if (s == Subset::Pos && !fitted.pos) throw ConfigError("subset 'pos' selected but no POS vocabulary was fitted");
    if (s == Subset::Lexicon && !fitted.lexicons) throw ConfigError("subset 'lexicon' selected but no lexicons loaded");
  }
  const bool need_temporal = std::find(subsets.begin(), subsets.end(), Subset::Temporal) != subsets.end();
  if (need_temporal && temporal.size() != prepared.size())
    throw DataError("temporal feature table does not match the message count");

  FeatureMatrix fm;
  fm.columns = feature_columns(fitted);
  const Index n = static_cast<Index>(prepared.size());
  fm.values = Matrix::Zero(n, static_cast<Index>(fm.columns.size()));
  Index col = 0;
  for (Subset s : subsets) {
    const Index begin = col;
    switch (s) {
      case Subset::General:
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < 10; ++j) fm.values(i, col + j) = prepared[i].general[j];
        col += 10;
        break;
      case Subset::Lexicon:
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < 10; ++j) fm.values(i, col + j) = prepared[i].lexicon[j];
        col += 10;
        break;
      case Subset::Bow: {
        const Index w = static_cast<Index>(fitted.bow->terms.size());
        for (Index i = 0; i < n; ++i) fm.values.row(i).segment(col, w) = bow_features(prepared[i].bow_tokens, *fitted.bow);
        col += w;
        break;
      }
      case Subset::Pos: {
        const Index w = static_cast<Index>(fitted.pos->pairs.size());
        for (Index i = 0; i < n; ++i) fm.values.row(i).segment(col, w) = pos_features(prepared[i].tags, *fitted.pos);
        col += w;
        break;
      }
      case Subset::Temporal:
        for (Index i = 0; i < n; ++i) {
          fm.values(i, col) = temporal[i].consecutive_posts;
          fm.values(i, col + 1) = temporal[i].window_share;
        }
        col += 2;
        break;
    }
    fm.subsets.push_back({s, begin, col});
  }
  return fm;
}

FeatureMatrix assemble(const Corpus& slice, const Corpus& context, const Featurizer& fitted) {
  const auto& lex = lexicons_or_empty(fitted.lexicons);
  std::vector<PreparedMessage> prepared;
  prepared.reserve(slice.size());
  for (const auto& m : slice.messages()) prepared.push_back(prepare_message(m, lex));
  const auto subsets = canonical_subsets(fitted.config.subsets);
  std::vector<TemporalFeatures> temporal;
  if (std::find(subsets.begin(), subsets.end(), Subset::Temporal) != subsets.end())
    temporal = temporal_for_slice(slice, context, fitted.config.window);
  return assemble(prepared, temporal, fitted);
}

Featurizer fit_featurizer(const std::vector<PreparedMessage>& train, std::span<const TemporalFeatures> temporal,
                          std::shared_ptr<const LexiconSet> lexicons, const FeaturizerConfig& config) {
  Featurizer f;
  f.config = config;
  f.config.subsets = canonical_subsets(config.subsets);
  f.lexicons = std::move(lexicons);
  const auto& subsets = f.config.subsets;
  auto selected = [&](Subset s) { return std::find(subsets.begin(), subsets.end(), s) != subsets.end(); };
  if (selected(Subset::Bow)) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(train.size());
    for (const auto& p : train) docs.push_back(p.bow_tokens);
    f.bow = fit_bow(docs, config.min_df, config.tfidf);
  }
  if (selected(Subset::Pos)) {
    std::vector<std::vector<PosTag>> docs;
    docs.reserve(train.size());
    for (const auto& p : train) docs.push_back(p.tags);
    f.pos = fit_pos_vocab(docs);
  }
  if (config.scale) {
    const auto m = assemble(train, temporal, f);
    std::vector<Index> cols;
    for (const auto& r : m.subsets) {
      if (r.subset == Subset::Bow && !config.scale_bow) continue;
      for (Index c = r.begin; c < r.end; ++c) cols.push_back(c);
    }
    f.scaler = fit_scaler(m.values, cols);
  }
  return f;
}

Featurizer fit_featurizer(const Corpus& train, const Corpus& context, std::shared_ptr<const LexiconSet> lexicons,
                          const FeaturizerConfig& config) {
  const auto& lex = lexicons ? *lexicons : empty_lexicons();
  std::vector<PreparedMessage> prepared;
  prepared.reserve(train.size());
  for (const auto& m : train.messages()) prepared.push_back(prepare_message(m, lex));
  const auto temporal = temporal_for_slice(train, context, config.window);
  return fit_featurizer(prepared, temporal, std::move(lexicons), config);
}

FeatureMatrix transform(const std::vector<PreparedMessage>& prepared, std::span<const TemporalFeatures> temporal,
                        const Featurizer& fitted) {
  auto m = assemble(prepared, temporal, fitted);
  if (fitted.scaler) m.values = apply_scaler(m.values, *fitted.scaler);
  return m;
}

FeatureMatrix transform(const Corpus& slice, const Corpus& context, const Featurizer& fitted) {
  auto m = assemble(slice, context, fitted);
  if (fitted.scaler) m.values = apply_scaler(m.values, *fitted.scaler);
  return m;
}

// ---------------------------------------------------------------- cache

PreparedCorpus::PreparedCorpus(const Corpus& context, std::shared_ptr<const LexiconSet> lexicons, int window)
    : context_(&context), lexicons_(std::move(lexicons)) {
  const auto& lex = lexicons_or_empty(lexicons_);
  prepared_.reserve(context.size());
  for (const auto& m : context.messages()) prepared_.push_back(prepare_message(m, lex));
  temporal_ = temporal_for_slice(context, context, window);
}

std::vector<PreparedMessage> PreparedCorpus::prepared(std::span<const std::size_t> indices) const {
  std::vector<PreparedMessage> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(prepared_.at(i));
  return out;
}

std::vector<TemporalFeatures> PreparedCorpus::temporal(std::span<const std::size_t> indices) const {
  std::vector<TemporalFeatures> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(temporal_.at(i));
  return out;
}

// ---------------------------------------------------------------- json

nlohmann::json featurizer_to_json(const Featurizer& f) {
  nlohmann::json subsets = nlohmann::json::array();
  for (Subset s : canonical_subsets(f.config.subsets)) subsets.push_back(std::string(to_string(s)));
  nlohmann::json j = {{"format_version", 1},
                      {"subsets", subsets},
                      {"min_df", f.config.min_df},
                      {"tfidf", f.config.tfidf},
                      {"scale", f.config.scale},
                      {"scale_bow", f.config.scale_bow},
                      {"window", f.config.window},
                      {"columns", feature_columns(f)}};
  j["lexicons"] = f.lexicons ? lexicons_to_json(*f.lexicons) : nlohmann::json(nullptr);
  if (f.bow)
    j["bow"] = {{"terms", f.bow->terms},
                {"document_frequency", f.bow->document_frequency},
                {"min_df", f.bow->min_df},
                {"documents", f.bow->documents},
                {"tfidf", f.bow->tfidf}};
  if (f.pos) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& t : f.pos->pairs) pairs.push_back(to_string(t));
    j["pos"] = {{"pairs", pairs}};
  }
  if (f.scaler) {
    j["scaler"] = {{"mean", std::vector<double>(f.scaler->mean.data(), f.scaler->mean.data() + f.scaler->mean.size())},
                   {"scale", std::vector<double>(f.scaler->scale.data(), f.scaler->scale.data() + f.scaler->scale.size())}};
  }
  return j;
}

Featurizer featurizer_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw DataError("featurizer json: unsupported format_version");
    Featurizer f;
    f.config.subsets.clear();
    for (const auto& s : j.at("subsets")) f.config.subsets.push_back(parse_subset(s.get<std::string>()));
    f.config.min_df = j.at("min_df").get<int>();
    f.config.tfidf = j.at("tfidf").get<bool>();
    f.config.scale = j.at("scale").get<bool>();
    f.config.scale_bow = j.at("scale_bow").get<bool>();
    f.config.window = j.at("window").get<int>();
    if (!j.at("lexicons").is_null()) f.lexicons = std::make_shared<LexiconSet>(lexicons_from_json(j["lexicons"]));
    if (j.contains("bow")) {
      BowVocab b;
      b.terms = j["bow"].at("terms").get<std::vector<std::string>>();
      b.document_frequency = j["bow"].at("document_frequency").get<std::vector<int>>();
      b.min_df = j["bow"].at("min_df").get<int>();
      b.documents = j["bow"].at("documents").get<std::size_t>();
      b.tfidf = j["bow"].at("tfidf").get<bool>();
      f.bow = std::move(b);
    }
    if (j.contains("pos")) {
      PosVocab p;
      for (const auto& t : j["pos"].at("pairs")) p.pairs.push_back(parse_pos_tag(t.get<std::string>()));
      f.pos = std::move(p);
    }
    if (j.contains("scaler")) {
      auto mean = j["scaler"].at("mean").get<std::vector<double>>();
      auto scale = j["scaler"].at("scale").get<std::vector<double>>();
      f.scaler = Scaler{Eigen::Map<Vector>(mean.data(), static_cast<Index>(mean.size())),
                        Eigen::Map<Vector>(scale.data(), static_cast<Index>(scale.size()))};
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("featurizer json: ") + e.what());
  }
}

}  // namespace msgclass
