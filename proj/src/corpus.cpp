#include "msgclass/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "msgclass/csv.hpp"
#include "msgclass/error.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
  if (pos + digits > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < digits; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += digits;
  out = v;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

constexpr std::array<std::string_view, 12> kRequiredColumns = {
    "id",       "timestamp", "school",      "cohort",    "user_id", "username",
    "book_id",  "text",      "translation", "relevance", "type",    "category_broad"};
constexpr std::array<std::string_view, 3> kDefaultObjectives = {"relevance", "type", "category_broad"};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  auto fail = [&]() -> Timestamp { throw DataError("unparseable timestamp '" + std::string(text) + "'"); };
  std::size_t p = 0;
  int y, mo, d, h, mi, sec = 0, ms = 0;
  if (!read_int(text, p, 4, y) || !expect(text, p, '-') || !read_int(text, p, 2, mo) || !expect(text, p, '-') ||
      !read_int(text, p, 2, d))
    return fail();
  if (!(expect(text, p, 'T') || expect(text, p, ' '))) return fail();
  if (!read_int(text, p, 2, h) || !expect(text, p, ':') || !read_int(text, p, 2, mi)) return fail();
  if (expect(text, p, ':')) {
    if (!read_int(text, p, 2, sec)) return fail();
    if (expect(text, p, '.')) {
      int scale = 100;
      std::size_t start = p;
      while (p < text.size() && text[p] >= '0' && text[p] <= '9') {
        ms += (text[p] - '0') * scale;
        scale /= 10;
        ++p;
      }
      if (p == start) return fail();
    }
  }
  int offset_min = 0;
  if (p < text.size()) {
    if (text[p] == 'Z' && p + 1 == text.size()) {
      ++p;
    } else if (text[p] == '+' || text[p] == '-') {
      int sign = text[p] == '-' ? -1 : 1;
      ++p;
      int oh, om;
      if (!read_int(text, p, 2, oh)) return fail();
      expect(text, p, ':');
      if (!read_int(text, p, 2, om)) return fail();
      offset_min = sign * (oh * 60 + om);
    }
  }
  if (p != text.size()) return fail();
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return fail();
  auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms} - minutes{offset_min};
  return time_point_cast<milliseconds>(tp);
}

std::string format_timestamp(Timestamp t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  int ms = static_cast<int>(tod.subseconds().count());
  if (ms) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), ms);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  }
  return buf;
}

// ---------------------------------------------------------------- Corpus

Corpus::Corpus(std::vector<Message> messages) : messages_(std::move(messages)) {
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& m : messages_)
    for (const auto& [objective, label] : m.labels) seen[objective].insert(label);
  for (auto& [objective, labels] : seen) objectives_[objective] = {labels.begin(), labels.end()};
  index_ids();
}

Corpus::Corpus(std::vector<Message> messages, Vocabularies objectives)
    : messages_(std::move(messages)), objectives_(std::move(objectives)) {
  for (const auto& m : messages_) {
    for (const auto& [objective, label] : m.labels) {
      auto it = objectives_.find(objective);
      if (it == objectives_.end() || !std::binary_search(it->second.begin(), it->second.end(), label))
        throw DataError("message " + m.id + ": label '" + label + "' not in vocabulary of '" + objective + "'");
    }
  }
  index_ids();
}

void Corpus::index_ids() {
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    auto [it, inserted] = by_id_.emplace(messages_[i].id, i);
    if (!inserted) throw DataError("duplicate message id '" + messages_[i].id + "'");
  }
}

bool Corpus::has_objective(std::string_view objective) const {
  return objectives_.find(std::string(objective)) != objectives_.end();
}

const std::vector<std::string>& Corpus::classes(std::string_view objective) const {
  auto it = objectives_.find(std::string(objective));
  if (it == objectives_.end()) throw ConfigError("unknown objective '" + std::string(objective) + "'");
  return it->second;
}

Labels Corpus::label_indices(std::string_view objective) const {
  const auto& vocab = classes(objective);
  Labels out(messages_.size(), -1);
  const std::string key(objective);
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    auto it = messages_[i].labels.find(key);
    if (it == messages_[i].labels.end()) continue;
    auto pos = std::lower_bound(vocab.begin(), vocab.end(), it->second);
    out[i] = static_cast<int>(pos - vocab.begin());
  }
  return out;
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

Corpus Corpus::subset(std::span<const std::size_t> indices) const {
  std::vector<Message> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(messages_.at(i));
  return Corpus(std::move(out), objectives_);
}

Corpus Corpus::without_labels(std::span<const std::size_t> indices, std::string_view objective) const {
  std::vector<Message> out = messages_;
  const std::string key(objective);
  for (auto i : indices) out.at(i).labels.erase(key);
  return Corpus(std::move(out), objectives_);
}

// ---------------------------------------------------------------- CSV

Corpus parse_corpus_csv(std::string_view content, std::vector<std::string>* warnings) {
  auto rows = csv::parse(content);
  if (rows.empty()) throw SchemaError("corpus: missing header row");
  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (auto name : kRequiredColumns)
    if (!col.count(std::string(name))) throw SchemaError("corpus: missing column '" + std::string(name) + "'");

  std::vector<std::string> objective_columns(kDefaultObjectives.begin(), kDefaultObjectives.end());
  if (col.count("category")) objective_columns.push_back("category");
  const bool has_pos = col.count("pos_tags") > 0;
  if (warnings) {
    for (const auto& name : header) {
      bool known = std::find(kRequiredColumns.begin(), kRequiredColumns.end(), name) != kRequiredColumns.end() ||
                   name == "category" || name == "pos_tags";
      if (!known) warnings->push_back("corpus: ignoring unknown column '" + name + "'");
    }
  }

  std::vector<Message> messages;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != header.size())
      throw DataError("corpus: row on line " + std::to_string(row.line) + " has " +
                      std::to_string(row.fields.size()) + " fields, expected " + std::to_string(header.size()));
    auto field = [&](std::string_view name) -> const std::string& { return row.fields[col.at(std::string(name))]; };
    Message m;
    m.id = field("id");
    if (m.id.empty()) throw DataError("corpus: empty id on line " + std::to_string(row.line));
    try {
      m.timestamp = parse_timestamp(field("timestamp"));
    } catch (const DataError& e) {
      throw DataError("corpus: line " + std::to_string(row.line) + ": " + e.what());
    }
    m.school = field("school");
    m.cohort = field("cohort");
    m.user_id = field("user_id");
    m.username = field("username");
    m.book_id = field("book_id");
    m.text = field("text");
    if (!field("translation").empty()) m.translation = field("translation");
    for (const auto& objective : objective_columns) {
      const auto& v = field(objective);
      if (!v.empty()) m.labels[objective] = v;
    }
    if (has_pos && !field("pos_tags").empty()) m.pos_tags = field("pos_tags");
    if (m.text.empty() && warnings) warnings->push_back("corpus: message " + m.id + " has empty text");
    messages.push_back(std::move(m));
  }
  return Corpus(std::move(messages));
}

Corpus load_corpus(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus_csv(buf.str(), warnings);
}

std::string corpus_to_csv(const Corpus& corpus) {
  std::vector<std::string> header(kRequiredColumns.begin(), kRequiredColumns.end());
  const bool has_category = corpus.has_objective("category");
  const bool has_pos = std::any_of(corpus.messages().begin(), corpus.messages().end(),
                                   [](const Message& m) { return m.pos_tags.has_value(); });
  if (has_category) header.push_back("category");
  if (has_pos) header.push_back("pos_tags");
  std::string out = csv::join(header) + "\n";
  for (const auto& m : corpus.messages()) {
    auto label = [&](const char* objective) {
      auto it = m.labels.find(objective);
      return it == m.labels.end() ? std::string() : it->second;
    };
    std::vector<std::string> row = {m.id,       format_timestamp(m.timestamp),
                                    m.school,   m.cohort,
                                    m.user_id,  m.username,
                                    m.book_id,  m.text,
                                    m.translation.value_or(""), label("relevance"),
                                    label("type"), label("category_broad")};
    if (has_category) row.push_back(label("category"));
    if (has_pos) row.push_back(m.pos_tags.value_or(""));
    out += csv::join(row) + "\n";
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  out << corpus_to_csv(corpus);
}

nlohmann::json corpus_to_json(const Corpus& corpus) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : corpus.messages()) {
    nlohmann::json j = {{"id", m.id},           {"timestamp", format_timestamp(m.timestamp)},
                        {"school", m.school},   {"cohort", m.cohort},
                        {"user_id", m.user_id}, {"username", m.username},
                        {"book_id", m.book_id}, {"text", m.text},
                        {"labels", m.labels}};
    j["translation"] = m.translation ? nlohmann::json(*m.translation) : nlohmann::json(nullptr);
    if (m.pos_tags) j["pos_tags"] = *m.pos_tags;
    msgs.push_back(std::move(j));
  }
  return {{"format_version", 1}, {"objectives", corpus.objectives()}, {"messages", std::move(msgs)}};
}

Corpus corpus_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != 1) throw DataError("corpus json: unsupported format_version");
    std::vector<Message> messages;
    for (const auto& j : doc.at("messages")) {
      Message m;
      m.id = j.at("id").get<std::string>();
      m.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
      m.school = j.at("school").get<std::string>();
      m.cohort = j.at("cohort").get<std::string>();
      m.user_id = j.at("user_id").get<std::string>();
      m.username = j.at("username").get<std::string>();
      m.book_id = j.at("book_id").get<std::string>();
      m.text = j.at("text").get<std::string>();
      if (j.contains("translation") && !j["translation"].is_null()) m.translation = j["translation"].get<std::string>();
      m.labels = j.at("labels").get<std::map<std::string, std::string>>();
      if (j.contains("pos_tags")) m.pos_tags = j["pos_tags"].get<std::string>();
      messages.push_back(std::move(m));
    }
    return Corpus(std::move(messages), doc.at("objectives").get<Corpus::Vocabularies>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corpus json: ") + e.what());
  }
}

// ---------------------------------------------------------------- Streams

std::vector<Stream> partition_streams(const Corpus& corpus) {
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.size(); ++i) groups[{corpus[i].school, corpus[i].cohort}].push_back(i);
  std::vector<Stream> out;
  out.reserve(groups.size());
  for (auto& [key, idx] : groups) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& ma = corpus[a];
      const auto& mb = corpus[b];
      if (ma.timestamp != mb.timestamp) return ma.timestamp < mb.timestamp;
      return ma.id < mb.id;
    });
    out.push_back({key.first, key.second, std::move(idx)});
  }
  return out;
}

// ---------------------------------------------------------------- Splits

TrainTestSplit split_train_test(const Corpus& corpus, double test_fraction, std::string_view objective,
                                std::uint64_t seed, std::vector<std::string>* warnings) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  const auto labels = corpus.label_indices(objective);
  const auto& classes = corpus.classes(objective);
  std::vector<std::vector<std::size_t>> by_label(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw DataError("message " + corpus[i].id + " has no label for '" + std::string(objective) + "'");
    by_label[labels[i]].push_back(i);
  }
  Rng rng(seed);
  TrainTestSplit split;
  for (std::size_t c = 0; c < by_label.size(); ++c) {
    auto& idx = by_label[c];
    if (idx.empty()) continue;
    rng.shuffle(idx);
    std::size_t n_test = 0;
    if (idx.size() < 2) {
      if (warnings) warnings->push_back("label '" + classes[c] + "' has fewer than 2 instances; kept in train");
    } else {
      n_test = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
      n_test = std::min(n_test, idx.size() - 1);
    }
    split.test_index.insert(split.test_index.end(), idx.begin(), idx.begin() + n_test);
    split.train_index.insert(split.train_index.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(split.train_index.begin(), split.train_index.end());
  std::sort(split.test_index.begin(), split.test_index.end());
  split.train = corpus.subset(split.train_index);
  split.test = corpus.subset(split.test_index);
  return split;
}

std::vector<int> stratified_assignment(std::span<const int> labels, int k, std::uint64_t seed) {
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  std::vector<int> fold(labels.size());
  // Dealing continues across label groups so total fold sizes stay balanced.
  for (std::size_t i = 0; i < order.size(); ++i) fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return fold;
}

int FoldPlan::fold_of(int repeat, std::string_view id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw DataError("fold plan: unknown id '" + std::string(id) + "'");
  return folds.at(repeat)[it - ids.begin()];
}

std::vector<std::size_t> FoldPlan::train_indices(int repeat, int fold) const {
  std::vector<std::size_t> out;
  const auto& f = folds.at(repeat);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::test_indices(int repeat, int fold) const {
  std::vector<std::size_t> out;
  const auto& f = folds.at(repeat);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] == fold) out.push_back(i);
  return out;
}

FoldPlan make_cv_folds(const Corpus& corpus, int k, int repeats, std::string_view objective, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cv: k must be at least 2");
  if (repeats < 1) throw ConfigError("cv: repeats must be at least 1");
  const auto labels = corpus.label_indices(objective);
  const auto& classes = corpus.classes(objective);
  std::vector<std::size_t> counts(classes.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw DataError("message " + corpus[i].id + " has no label for '" + std::string(objective) + "'");
    ++counts[labels[i]];
  }
  std::string too_small;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0 && counts[c] < static_cast<std::size_t>(k)) {
      if (!too_small.empty()) too_small += ", ";
      too_small += classes[c] + " (" + std::to_string(counts[c]) + ")";
    }
  }
  if (!too_small.empty())
    throw DataError("cv: k=" + std::to_string(k) + " exceeds the instance count of label(s): " + too_small);

  FoldPlan plan;
  plan.objective = std::string(objective);
  plan.k = k;
  plan.repeats = repeats;
  plan.seed = seed;
  for (const auto& m : corpus.messages()) plan.ids.push_back(m.id);
  for (int r = 0; r < repeats; ++r) plan.folds.push_back(stratified_assignment(labels, k, mix_seed(seed, r)));
  return plan;
}

nlohmann::json fold_plan_to_json(const FoldPlan& plan) {
  return {{"format_version", 1}, {"objective", plan.objective}, {"k", plan.k},     {"repeats", plan.repeats},
          {"seed", plan.seed},   {"ids", plan.ids},             {"folds", plan.folds}};
}

FoldPlan fold_plan_from_json(const nlohmann::json& doc) {
  try {
    FoldPlan plan;
    plan.objective = doc.at("objective").get<std::string>();
    plan.k = doc.at("k").get<int>();
    plan.repeats = doc.at("repeats").get<int>();
    plan.seed = doc.at("seed").get<std::uint64_t>();
    plan.ids = doc.at("ids").get<std::vector<std::string>>();
    plan.folds = doc.at("folds").get<std::vector<std::vector<int>>>();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("fold plan json: ") + e.what());
  }
}

}  // namespace msgclass
