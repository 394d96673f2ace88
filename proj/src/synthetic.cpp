#include "msgclass/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "msgclass/error.hpp"
#include "msgclass/random.hpp"
#include "msgclass/unicode.hpp"

namespace msgclass {

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0 && p <= 1)) throw ConfigError(what + " must be a probability in [0, 1]");
}

StyleSpec style_from_json(const nlohmann::json& j, const std::string& where) {
  StyleSpec s;
  for (const auto& [key, value] : j.items()) {
    const double p = value.get<double>();
    check_probability(p, where + "." + key);
    if (key == "question_mark") s.question_mark = p;
    else if (key == "period") s.period = p;
    else if (key == "exclaim") s.exclaim = p;
    else if (key == "stretch") s.stretch = p;
    else if (key == "capitalize") s.capitalize = p;
    else if (key == "shout") s.shout = p;
    else if (key == "digits") s.digits = p;
    else if (key == "gibberish") s.gibberish = p;
    else throw ConfigError("unknown style '" + key + "' in " + where);
  }
  return s;
}

ObjectiveSpec objective_from_json(const nlohmann::json& j) {
  ObjectiveSpec o;
  o.name = j.at("name").get<std::string>();
  o.labels = j.at("labels").get<std::vector<std::string>>();
  o.probabilities = j.at("probabilities").get<std::vector<double>>();
  const std::string where = "objective '" + o.name + "'";
  if (o.labels.empty()) throw ConfigError(where + " has no labels");
  if (o.labels.size() != o.probabilities.size()) throw ConfigError(where + ": labels and probabilities differ in length");
  auto sorted = o.labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError(where + " repeats a label");
  double total = 0;
  for (double p : o.probabilities) {
    if (!(p >= 0)) throw ConfigError(where + ": probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", total);
    throw ConfigError(where + ": label probabilities sum to " + buf + ", not 1");
  }
  read(j, "persistence", o.persistence);
  check_probability(o.persistence, where + ".persistence");
  if (j.contains("transition") && !j.at("transition").is_null()) {
    const auto rows = j.at("transition").get<std::vector<std::vector<double>>>();
    const auto k = o.labels.size();
    if (rows.size() != k) throw ConfigError(where + ": transition must be " + std::to_string(k) + " rows");
    Matrix t(static_cast<Index>(k), static_cast<Index>(k));
    for (std::size_t r = 0; r < k; ++r) {
      if (rows[r].size() != k) throw ConfigError(where + ": transition rows must have " + std::to_string(k) + " entries");
      double sum = 0;
      for (std::size_t c = 0; c < k; ++c) {
        if (!(rows[r][c] >= 0)) throw ConfigError(where + ": transition entries must be non-negative");
        t(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        sum += rows[r][c];
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(where + ": transition row " + std::to_string(r) + " does not sum to 1");
    }
    o.transition = t;
  }
  read(j, "signal", o.signal);
  check_probability(o.signal, where + ".signal");
  if (j.contains("pools"))
    for (const auto& [label, words] : j.at("pools").items()) {
      if (std::find(o.labels.begin(), o.labels.end(), label) == o.labels.end())
        throw ConfigError(where + ": pool for unknown label '" + label + "'");
      o.pools[label] = words.get<std::vector<std::string>>();
    }
  if (j.contains("styles"))
    for (const auto& [label, style] : j.at("styles").items()) {
      if (std::find(o.labels.begin(), o.labels.end(), label) == o.labels.end())
        throw ConfigError(where + ": style for unknown label '" + label + "'");
      o.styles[label] = style_from_json(style, where + ".styles." + label);
    }
  return o;
}

// One chat room while it is being generated.
struct RoomState {
  std::string school;
  std::string cohort;
  std::string book;
  std::vector<std::string> user_ids;
  std::vector<std::string> usernames;
  Timestamp clock;
  int last_poster = -1;
  std::vector<int> last_label;  // per objective
};

std::string fill_placeholders(const std::string& word, const RoomState& room, const std::vector<std::string>& names,
                              Rng& rng) {
  if (word == "{username}") return room.usernames[rng.index(room.usernames.size())];
  if (word == "{name}") {
    if (names.empty()) return "ime";
    std::string n = names[rng.index(names.size())];
    return unicode::to_upper(n.substr(0, 1)) + n.substr(1);
  }
  if (word == "{book}") return room.book;
  return word;
}

std::string stretch(const std::string& word, Rng& rng) {
  const auto cps = unicode::decode(word);
  std::vector<std::size_t> letters;
  for (std::size_t i = 0; i < cps.size(); ++i)
    if (unicode::is_letter(cps[i].value)) letters.push_back(i);
  if (letters.empty()) return word;
  const auto at = letters[rng.index(letters.size())];
  std::string out;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const int copies = i == at ? 3 + static_cast<int>(rng.index(3)) : 1;
    for (int c = 0; c < copies; ++c) unicode::append_utf8(out, cps[i].value);
  }
  return out;
}

std::string capitalize(const std::string& text) {
  const auto cps = unicode::decode(text);
  if (cps.empty()) return text;
  std::string out;
  unicode::append_utf8(out, unicode::to_upper(cps[0].value));
  out += text.substr(cps[0].length);
  return out;
}

}  // namespace

GeneratorConfig generator_config_from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  try {
    if (j.contains("format_version") && j.at("format_version").get<int>() != 1)
      throw ConfigError("generator config: unsupported format_version");
    read(j, "messages", c.messages);
    read(j, "schools", c.schools);
    read(j, "cohorts", c.cohorts);
    read(j, "users_per_stream", c.users_per_stream);
    read(j, "repeat_poster", c.repeat_poster);
    read(j, "start", c.start);
    read(j, "mean_gap_seconds", c.mean_gap_seconds);
    read(j, "books", c.books);
    read(j, "min_words", c.min_words);
    read(j, "max_words", c.max_words);
    read(j, "variant_rate", c.variant_rate);
    read(j, "filler", c.filler);
    if (j.contains("objectives"))
      for (const auto& o : j.at("objectives")) c.objectives.push_back(objective_from_json(o));
    if (j.contains("lexicons")) c.lexicons = j.at("lexicons");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  if (c.schools < 1 || c.cohorts < 1 || c.users_per_stream < 1)
    throw ConfigError("generator config: schools, cohorts and users_per_stream must be at least 1");
  if (c.min_words < 1 || c.max_words < c.min_words)
    throw ConfigError("generator config: need 1 <= min_words <= max_words");
  if (!(c.mean_gap_seconds > 0)) throw ConfigError("generator config: mean_gap_seconds must be positive");
  check_probability(c.repeat_poster, "repeat_poster");
  check_probability(c.variant_rate, "variant_rate");
  double signal = 0;
  for (const auto& o : c.objectives) signal += o.signal;
  if (signal > 1 + 1e-9) throw ConfigError("generator config: objective signals add up to more than 1");
  if (c.filler.empty() && signal < 1 - 1e-9) throw ConfigError("generator config: filler words are required");
  try {
    parse_timestamp(c.start);
  } catch (const DataError& e) {
    throw ConfigError(std::string("generator config: start: ") + e.what());
  }
  if (c.books.empty()) c.books = {"book"};
  return c;
}

LexiconSet synthetic_lexicons(const GeneratorConfig& config) {
  return config.lexicons.is_null() ? LexiconSet{} : lexicons_from_json(config.lexicons);
}

Corpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const LexiconSet lex = synthetic_lexicons(config);
  std::vector<std::string> names(lex.given_names.begin(), lex.given_names.end());
  std::sort(names.begin(), names.end());
  std::vector<std::string> handles(lex.chat_usernames.begin(), lex.chat_usernames.end());
  std::sort(handles.begin(), handles.end());

  // standard form -> colloquial spellings
  std::map<std::string, std::vector<std::string>> variants;
  for (const auto& [variant, standard] : lex.normalization)
    if (variant != standard && standard.find(' ') == std::string::npos) variants[standard].push_back(variant);
  for (auto& [_, v] : variants) std::sort(v.begin(), v.end());

  const Timestamp start = parse_timestamp(config.start);
  std::vector<RoomState> rooms;
  for (int s = 0; s < config.schools; ++s)
    for (int c = 0; c < config.cohorts; ++c) {
      RoomState room;
      room.school = "school" + std::to_string(s + 1);
      room.cohort = "cohort" + std::to_string(c + 1);
      room.book = config.books[static_cast<std::size_t>(s) % config.books.size()];
      for (int u = 0; u < config.users_per_stream; ++u) {
        const auto n = rooms.size() * static_cast<std::size_t>(config.users_per_stream) + static_cast<std::size_t>(u);
        room.user_ids.push_back("u" + std::to_string(s + 1) + std::to_string(c + 1) + "_" + std::to_string(u + 1));
        room.usernames.push_back(handles.empty() ? "user" + std::to_string(n + 1) : handles[n % handles.size()]);
      }
      room.clock = start + std::chrono::minutes(7 * static_cast<int>(rooms.size()));
      room.last_label.assign(config.objectives.size(), -1);
      rooms.push_back(std::move(room));
    }

  std::vector<Message> messages;
  messages.reserve(config.messages);
  for (std::size_t i = 0; i < config.messages; ++i) {
    auto& room = rooms[rng.index(rooms.size())];
    Message m;
    const auto gap = std::chrono::milliseconds(1000 + static_cast<long long>(rng.exponential(config.mean_gap_seconds * 1000)));
    room.clock += gap;
    m.timestamp = room.clock;
    m.school = room.school;
    m.cohort = room.cohort;
    m.book_id = room.book;
    int poster = room.last_poster;
    if (poster < 0 || rng.uniform() >= config.repeat_poster) poster = static_cast<int>(rng.index(room.user_ids.size()));
    room.last_poster = poster;
    m.user_id = room.user_ids[static_cast<std::size_t>(poster)];
    m.username = room.usernames[static_cast<std::size_t>(poster)];

    std::vector<int> labels(config.objectives.size());
    for (std::size_t o = 0; o < config.objectives.size(); ++o) {
      const auto& spec = config.objectives[o];
      const int prev = room.last_label[o];
      int label;
      if (prev >= 0 && spec.transition) {
        const Vector row = spec.transition->row(prev).transpose();
        label = static_cast<int>(rng.categorical(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))));
      } else if (prev >= 0 && rng.uniform() < spec.persistence) {
        label = prev;
      } else {
        label = static_cast<int>(rng.categorical(spec.probabilities));
      }
      room.last_label[o] = label;
      labels[o] = label;
      m.labels[spec.name] = spec.labels[static_cast<std::size_t>(label)];
    }

    const int words = config.min_words + static_cast<int>(rng.index(static_cast<std::size_t>(config.max_words - config.min_words + 1)));
    std::vector<std::string> tokens;
    for (int w = 0; w < words; ++w) {
      double u = rng.uniform();
      const std::vector<std::string>* pool = &config.filler;
      for (std::size_t o = 0; o < config.objectives.size(); ++o) {
        const auto& spec = config.objectives[o];
        if (u < spec.signal) {
          const auto it = spec.pools.find(spec.labels[static_cast<std::size_t>(labels[o])]);
          if (it != spec.pools.end() && !it->second.empty()) pool = &it->second;
          break;
        }
        u -= spec.signal;
      }
      if (pool->empty()) continue;
      std::string word = fill_placeholders((*pool)[rng.index(pool->size())], room, names, rng);
      const auto v = variants.find(word);
      if (v != variants.end() && rng.uniform() < config.variant_rate) word = v->second[rng.index(v->second.size())];
      tokens.push_back(std::move(word));
    }

    StyleSpec style;
    for (std::size_t o = 0; o < config.objectives.size(); ++o) {
      const auto& spec = config.objectives[o];
      const auto it = spec.styles.find(spec.labels[static_cast<std::size_t>(labels[o])]);
      if (it == spec.styles.end()) continue;
      const auto& s = it->second;
      style.question_mark = std::max(style.question_mark, s.question_mark);
      style.period = std::max(style.period, s.period);
      style.exclaim = std::max(style.exclaim, s.exclaim);
      style.stretch = std::max(style.stretch, s.stretch);
      style.capitalize = std::max(style.capitalize, s.capitalize);
      style.shout = std::max(style.shout, s.shout);
      style.digits = std::max(style.digits, s.digits);
      style.gibberish = std::max(style.gibberish, s.gibberish);
    }
    if (rng.uniform() < style.digits) tokens.push_back(std::to_string(1 + rng.index(999)));
    if (rng.uniform() < style.gibberish) {
      std::string g;
      const auto len = 4 + rng.index(5);
      for (std::size_t c = 0; c < len; ++c) g += static_cast<char>('a' + rng.index(26));
      tokens.push_back(g);
    }
    if (!tokens.empty() && rng.uniform() < style.stretch) {
      auto& t = tokens[rng.index(tokens.size())];
      t = stretch(t, rng);
    }
    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    if (rng.uniform() < style.capitalize) text = capitalize(text);
    if (rng.uniform() < style.shout) text = unicode::to_upper(text);
    if (rng.uniform() < style.question_mark) text += "?";
    else if (rng.uniform() < style.exclaim) text += rng.uniform() < 0.5 ? "!" : "!!";
    else if (rng.uniform() < style.period) text += ".";
    m.text = text.empty() ? "..." : text;
    messages.push_back(std::move(m));
  }

  std::stable_sort(messages.begin(), messages.end(),
                   [](const Message& a, const Message& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < messages.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "m%05zu", i + 1);
    messages[i].id = id;
  }
  // Vocabularies are discovered, so labels that were never drawn do not appear.
  return Corpus(std::move(messages));
}

}  // namespace msgclass
