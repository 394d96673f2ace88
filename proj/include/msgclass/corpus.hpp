#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msgclass/types.hpp"

namespace msgclass {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts `YYYY-MM-DD[T| ]hh:mm[:ss[.fff]][Z|+hh:mm|-hh:mm]`; a missing zone
// means UTC. Throws DataError on anything else.
Timestamp parse_timestamp(std::string_view text);
// Canonical UTC form; milliseconds are printed only when non-zero.
std::string format_timestamp(Timestamp t);

inline constexpr std::string_view kObjectiveRelevance = "relevance";
inline constexpr std::string_view kObjectiveType = "type";
inline constexpr std::string_view kObjectiveCategoryBroad = "category_broad";

struct Message {
  std::string id;
  Timestamp timestamp{};
  std::string school;
  std::string cohort;
  std::string user_id;
  std::string username;
  std::string book_id;
  std::string text;
  std::optional<std::string> translation;
  // Objective name -> label. An objective with an empty cell is absent.
  std::map<std::string, std::string> labels;
  // Optional pre-tagged POS sequence (`category:subtype` separated by spaces).
  std::optional<std::string> pos_tags;

  bool operator==(const Message&) const = default;
};

// Ordered, immutable message collection with per-objective label
// vocabularies. Vocabularies are discovered from the data and sorted.
class Corpus {
 public:
  using Vocabularies = std::map<std::string, std::vector<std::string>>;

  Corpus() = default;
  // Discovers vocabularies. Throws DataError on duplicate ids.
  explicit Corpus(std::vector<Message> messages);
  // Uses the given vocabularies (used for slices that must keep the parent's
  // class order). Throws DataError if a label is outside its vocabulary.
  Corpus(std::vector<Message> messages, Vocabularies objectives);

  const std::vector<Message>& messages() const { return messages_; }
  const Message& operator[](std::size_t i) const { return messages_[i]; }
  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }

  const Vocabularies& objectives() const { return objectives_; }
  bool has_objective(std::string_view objective) const;
  // Throws ConfigError for an unknown objective.
  const std::vector<std::string>& classes(std::string_view objective) const;
  // Per-message class index, -1 where the message is unlabeled.
  Labels label_indices(std::string_view objective) const;

  std::optional<std::size_t> find(std::string_view id) const;

  // Slice in the given order, keeping this corpus' vocabularies.
  Corpus subset(std::span<const std::size_t> indices) const;
  // Copy with the given objective's labels removed from the listed messages.
  Corpus without_labels(std::span<const std::size_t> indices, std::string_view objective) const;

  bool operator==(const Corpus& other) const {
    return messages_ == other.messages_ && objectives_ == other.objectives_;
  }

 private:
  void index_ids();

  std::vector<Message> messages_;
  Vocabularies objectives_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

// CSV I/O. The header must contain every column of
// `id,timestamp,school,cohort,user_id,username,book_id,text,translation,relevance,type,category_broad`;
// optional `category` (extra objective) and `pos_tags` columns are accepted.
// Warnings (empty text, ignored columns) are appended to `warnings` if given.
Corpus load_corpus(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
Corpus parse_corpus_csv(std::string_view content, std::vector<std::string>* warnings = nullptr);
std::string corpus_to_csv(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// JSON save format (`format_version` 1): {"format_version", "objectives",
// "messages": [{id, timestamp, school, cohort, user_id, username, book_id,
// text, translation|null, labels{}, pos_tags?}]}.
nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& doc);

struct Stream {
  std::string school;
  std::string cohort;
  // Corpus indices ordered by (timestamp, id).
  std::vector<std::size_t> indices;
};

// One stream per (school, cohort), streams ordered by key.
std::vector<Stream> partition_streams(const Corpus& corpus);

struct TrainTestSplit {
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
  Corpus train;
  Corpus test;
};

// Stratified split; labels with fewer than two instances go to train with a
// warning. Throws DataError if a message lacks the objective's label.
TrainTestSplit split_train_test(const Corpus& corpus, double test_fraction, std::string_view objective,
                                std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

// Repeated stratified k-fold assignment.
struct FoldPlan {
  std::string objective;
  int k = 10;
  int repeats = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> ids;
  // folds[repeat][i] is the fold of message ids[i].
  std::vector<std::vector<int>> folds;

  int fold_of(int repeat, std::string_view id) const;
  std::vector<std::size_t> train_indices(int repeat, int fold) const;
  std::vector<std::size_t> test_indices(int repeat, int fold) const;
  std::size_t evaluations() const { return static_cast<std::size_t>(k) * repeats; }
};

FoldPlan make_cv_folds(const Corpus& corpus, int k, int repeats, std::string_view objective, std::uint64_t seed);

nlohmann::json fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const nlohmann::json& doc);

// Assigns each position a fold in [0, k): positions are shuffled, grouped by
// label, and dealt round-robin, so every fold holds floor or ceil of each
// label's share. Labels of -1 are treated as their own group.
std::vector<int> stratified_assignment(std::span<const int> labels, int k, std::uint64_t seed);

}  // namespace msgclass
