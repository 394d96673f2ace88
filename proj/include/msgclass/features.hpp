#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msgclass/corpus.hpp"
#include "msgclass/textnorm.hpp"
#include "msgclass/types.hpp"

namespace msgclass {

enum class Subset { General, Lexicon, Bow, Pos, Temporal };

inline constexpr std::array<Subset, 5> kAllSubsets = {Subset::General, Subset::Lexicon, Subset::Bow, Subset::Pos,
                                                      Subset::Temporal};

std::string_view to_string(Subset s);
// Throws ConfigError for unknown names.
Subset parse_subset(std::string_view name);
// Canonical order general|lexicon|bow|pos|temporal, duplicates removed.
std::vector<Subset> canonical_subsets(std::vector<Subset> selection);

struct SubsetRange {
  Subset subset;
  Index begin;
  Index end;  // exclusive
  Index size() const { return end - begin; }
};

// Instance x feature table; subset ranges are contiguous, disjoint and cover
// every column.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> columns;
  std::vector<SubsetRange> subsets;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  const SubsetRange* find(Subset s) const;
};

inline constexpr std::array<std::string_view, 10> kGeneralFeatureNames = {
    "word_count",  "max_word_len", "min_word_len",      "avg_word_len",       "digit_count",
    "punct_count", "capital_count", "repeat_char_count", "starts_with_capital", "ends_with_period"};

inline constexpr std::array<std::string_view, 5> kLexiconLists = {"curse_words", "given_names", "chat_usernames",
                                                                  "book_names", "key_lemmas"};

// word_count, max/min/avg word length (code points), digit count, punctuation
// count (punctuation tokens plus interior punctuation), capital letters,
// repeated characters (run length - 1 summed over non-space runs), starts
// with a capital, ends with a period.
std::array<double, 10> general_features(std::string_view text);

// For each list in kLexiconLists: matching token count, then a 0/1 flag.
// Lists are matched against normalized tokens (and the raw lowercase token);
// key lemmas are matched against lemmatized tokens.
std::array<double, 10> lexicon_features(std::string_view text, const LexiconSet& lexicons);

struct BowVocab {
  std::vector<std::string> terms;  // lexicographic; bigrams joined by one space
  std::vector<int> document_frequency;
  int min_df = 2;
  std::size_t documents = 0;
  bool tfidf = false;

  std::optional<std::size_t> index_of(std::string_view term) const;
};

// Unigrams and adjacent bigrams of each normalized token sequence.
std::vector<std::string> bow_terms(const std::vector<std::string>& tokens);
BowVocab fit_bow(const std::vector<std::vector<std::string>>& documents, int min_df = 2, bool tfidf = false);
// Raw counts (or counts times smoothed idf when the vocab has tfidf set).
Vector bow_features(const std::vector<std::string>& tokens, const BowVocab& vocab);

struct PosVocab {
  std::vector<PosTag> pairs;  // sorted, unique
  std::optional<std::size_t> index_of(const PosTag& tag) const;
};

PosVocab fit_pos_vocab(const std::vector<std::vector<PosTag>>& tagged_documents);
Vector pos_features(const std::vector<PosTag>& tags, const PosVocab& vocab);

struct TemporalFeatures {
  int consecutive_posts = 1;
  int window_share = 0;
  bool operator==(const TemporalFeatures&) const = default;
};

// Run length of the poster ending at `position` (inclusive), and the number
// of the poster's messages among the `window` messages strictly before it.
TemporalFeatures temporal_features(const Corpus& corpus, const Stream& stream, std::size_t position, int window = 20);

// Per-message text analyses that do not depend on any fitted artifact.
struct PreparedMessage {
  std::array<double, 10> general{};
  std::array<double, 10> lexicon{};
  std::vector<std::string> bow_tokens;  // normalized + lemmatized
  std::vector<PosTag> tags;
};

PreparedMessage prepare_message(const Message& message, const LexiconSet& lexicons);

struct FeaturizerConfig {
  std::vector<Subset> subsets{kAllSubsets.begin(), kAllSubsets.end()};
  int min_df = 2;
  bool tfidf = false;
  bool scale = true;
  bool scale_bow = false;
  int window = 20;
};

// Per-column z-scoring; zero-variance and unselected columns keep mean 0 and
// scale 1 so they pass through unchanged.
struct Scaler {
  Vector mean;
  Vector scale;
};

template <typename Derived>
Scaler fit_scaler(const Eigen::MatrixBase<Derived>& train, std::span<const Index> columns) {
  using Scalar = typename Derived::Scalar;
  Scaler s{Vector::Zero(train.cols()), Vector::Ones(train.cols())};
  if (train.rows() == 0) return s;
  for (Index c : columns) {
    const auto col = train.col(c);
    const Scalar mean = col.mean();
    const Scalar var = (col.array() - mean).square().mean();
    if (var > Scalar(1e-24)) {
      s.mean(c) = static_cast<double>(mean);
      s.scale(c) = std::sqrt(static_cast<double>(var));
    }
  }
  return s;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> apply_scaler(const Eigen::MatrixBase<Derived>& m, const Scaler& s) {
  using Scalar = typename Derived::Scalar;
  const auto mean = s.mean.template cast<Scalar>().transpose();
  const auto scale = s.scale.template cast<Scalar>().transpose();
  return (m.rowwise() - mean).array().rowwise() / scale.array();
}

// Everything fitted on training data that a transform needs. Immutable once
// built; sharing across threads is safe.
struct Featurizer {
  FeaturizerConfig config;
  std::shared_ptr<const LexiconSet> lexicons;
  std::optional<BowVocab> bow;
  std::optional<PosVocab> pos;
  std::optional<Scaler> scaler;
};

// Column layout for the configured subsets, in canonical order.
std::vector<std::string> feature_columns(const Featurizer& f);

// Builds the unscaled matrix for `slice`. Temporal features are looked up in
// the streams of `context`, which must contain every message of `slice`
// (labels are never read). Throws ConfigError when a selected subset has no
// fitted artifact.
FeatureMatrix assemble(const Corpus& slice, const Corpus& context, const Featurizer& fitted);
FeatureMatrix assemble(const std::vector<PreparedMessage>& prepared, std::span<const TemporalFeatures> temporal,
                       const Featurizer& fitted);

// Fits vocabularies and (optionally) the scaler on `train`.
Featurizer fit_featurizer(const Corpus& train, const Corpus& context, std::shared_ptr<const LexiconSet> lexicons,
                          const FeaturizerConfig& config);
Featurizer fit_featurizer(const std::vector<PreparedMessage>& train, std::span<const TemporalFeatures> temporal,
                          std::shared_ptr<const LexiconSet> lexicons, const FeaturizerConfig& config);
// assemble + scaler.
FeatureMatrix transform(const Corpus& slice, const Corpus& context, const Featurizer& fitted);
FeatureMatrix transform(const std::vector<PreparedMessage>& prepared, std::span<const TemporalFeatures> temporal,
                        const Featurizer& fitted);

// Caches per-message preparation and temporal features of one context corpus
// so repeated fits (cross-validation) skip re-tokenizing.
class PreparedCorpus {
 public:
  PreparedCorpus(const Corpus& context, std::shared_ptr<const LexiconSet> lexicons, int window = 20);

  const Corpus& context() const { return *context_; }
  const std::shared_ptr<const LexiconSet>& lexicons() const { return lexicons_; }
  std::vector<PreparedMessage> prepared(std::span<const std::size_t> indices) const;
  std::vector<TemporalFeatures> temporal(std::span<const std::size_t> indices) const;

 private:
  const Corpus* context_;
  std::shared_ptr<const LexiconSet> lexicons_;
  std::vector<PreparedMessage> prepared_;
  std::vector<TemporalFeatures> temporal_;
};

nlohmann::json featurizer_to_json(const Featurizer& f);
Featurizer featurizer_from_json(const nlohmann::json& doc);

}  // namespace msgclass
