#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace msgclass {

enum class TokenKind { Word, Punct, Symbol };

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Word;
  std::size_t offset = 0;  // byte offset in the source text
  bool operator==(const Token&) const = default;
};

// Splits on whitespace. Leading and trailing punctuation of a chunk become
// single-character punctuation tokens; symbol and emoji characters become
// single-character symbol tokens wherever they occur; interior punctuation
// (apostrophes, hyphens) stays inside the word.
std::vector<Token> tokenize(std::string_view text);

// Reduces every maximal run of one repeated character to a single character.
std::string collapse_repeats(std::string_view token);
// Same, but only runs of letters are reduced; digits and other characters are
// left untouched.
std::string collapse_letter_repeats(std::string_view token);

enum class PosCategory {
  Noun,
  Verb,
  Adjective,
  Adverb,
  Pronoun,
  Numeral,
  Preposition,
  Conjunction,
  Particle,
  Interjection,
  Abbreviation,
  Residual,
};

inline constexpr std::array<std::string_view, 12> kPosCategoryNames = {
    "noun",        "verb",     "adjective",    "adverb",       "pronoun",  "numeral",
    "preposition", "conjunction", "particle", "interjection", "abbreviation", "residual"};

std::string_view to_string(PosCategory c);
// Throws DataError for names outside the closed set.
PosCategory parse_pos_category(std::string_view name);

struct PosTag {
  PosCategory category = PosCategory::Residual;
  std::string subtype = "unknown";

  auto operator<=>(const PosTag&) const = default;
  bool operator==(const PosTag&) const = default;
  static PosTag unknown() { return {}; }
};

std::string to_string(const PosTag& tag);  // "category:subtype"
PosTag parse_pos_tag(std::string_view text);

// Lexical resources. All keys are lowercase; lookups of absent keys fall back
// to identity (or the unknown tag) instead of failing.
struct LexiconSet {
  std::unordered_map<std::string, std::string> normalization;
  std::unordered_map<std::string, std::string> lemmas;
  std::unordered_map<std::string, PosTag> pos;
  std::unordered_set<std::string> curse_words;
  std::unordered_set<std::string> given_names;
  std::unordered_set<std::string> chat_usernames;
  std::unordered_set<std::string> book_names;
  std::unordered_set<std::string> key_lemmas;

  const std::string& standardize(const std::string& token) const;
  const std::string& lemma(const std::string& token) const;
  PosTag tag(const std::string& token) const;
};

// Any unset path means "empty resource".
struct LexiconPaths {
  std::optional<std::filesystem::path> normalization;  // variant<TAB>standard
  std::optional<std::filesystem::path> lemmas;         // token<TAB>lemma
  std::optional<std::filesystem::path> pos;            // token<TAB>category:subtype
  std::optional<std::filesystem::path> curse_words;    // one entry per line
  std::optional<std::filesystem::path> given_names;
  std::optional<std::filesystem::path> chat_usernames;
  std::optional<std::filesystem::path> book_names;
  std::optional<std::filesystem::path> key_lemmas;

  // Standard file names inside one directory (missing files are skipped).
  static LexiconPaths in_directory(const std::filesystem::path& dir);
};

LexiconSet load_lexicons(const LexiconPaths& paths);
void save_lexicons(const LexiconSet& lexicons, const std::filesystem::path& dir);
nlohmann::json lexicons_to_json(const LexiconSet& lexicons);
LexiconSet lexicons_from_json(const nlohmann::json& doc);

struct NormalizeStages {
  bool lowercase = true;
  bool drop_punct = true;  // drops punctuation/symbol tokens and interior punctuation
  bool collapse = true;    // letter runs only
  bool standardize = true;
  bool lemmatize = false;

  static NormalizeStages bow() { return {true, true, true, true, true}; }
  static NormalizeStages pos() { return {true, true, true, true, false}; }
};

// Applies, in order: lowercase, punctuation removal, repeat collapsing,
// normalization map, lemma map. Tokens emptied by a stage are dropped.
std::vector<std::string> normalize(std::string_view text, const LexiconSet& lexicons,
                                   NormalizeStages stages = NormalizeStages::pos());

// Lexicon tagger: one tag per token, unknown tokens get residual:unknown.
std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens, const LexiconSet& lexicons);
// Parses a pre-tagged column (`category:subtype` separated by whitespace).
std::vector<PosTag> parse_pos_column(std::string_view column);

}  // namespace msgclass
