#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msgclass/corpus.hpp"
#include "msgclass/textnorm.hpp"
#include "msgclass/types.hpp"

namespace msgclass {

// Per-label surface habits, each a probability per message.
struct StyleSpec {
  double question_mark = 0;
  double period = 0;
  double exclaim = 0;
  double stretch = 0;     // repeat one letter of a word
  double capitalize = 0;  // first letter upper case
  double shout = 0;       // whole message upper case
  double digits = 0;
  double gibberish = 0;
};

struct ObjectiveSpec {
  std::string name;
  std::vector<std::string> labels;
  std::vector<double> probabilities;
  // Label chains per stream: keep the previous label with probability
  // `persistence`, otherwise draw from `probabilities`. An explicit
  // row-stochastic `transition` (ordered like `labels`) overrides it.
  double persistence = 0;
  std::optional<Matrix> transition;
  double signal = 0;  // share of words drawn from this objective's label pools
  std::map<std::string, std::vector<std::string>> pools;
  std::map<std::string, StyleSpec> styles;
};

struct GeneratorConfig {
  std::size_t messages = 3000;
  int schools = 3;
  int cohorts = 2;
  int users_per_stream = 6;
  double repeat_poster = 0.3;
  std::string start = "2019-03-04T08:00:00Z";
  double mean_gap_seconds = 45;
  std::vector<std::string> books;
  std::vector<ObjectiveSpec> objectives;
  int min_words = 1;
  int max_words = 8;
  double variant_rate = 0.25;  // chance a word with a colloquial variant is written that way
  std::vector<std::string> filler;
  nlohmann::json lexicons;  // lexicons_to_json layout
};

// Throws ConfigError on invalid values, including label probabilities that
// do not sum to 1 within 1e-9.
GeneratorConfig generator_config_from_json(const nlohmann::json& doc);
// The bundled configuration (the default corpus of `generate`).
const nlohmann::json& default_generator_json();

// Seeded and deterministic. Messages come out in time order.
Corpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);
LexiconSet synthetic_lexicons(const GeneratorConfig& config);

}  // namespace msgclass
