#include <fstream>
#include <map>
#include <set>

#include "msgclass/error.hpp"
#include "msgclass/textnorm.hpp"
#include "msgclass/unicode.hpp"

namespace msgclass {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

template <typename Fn>
void read_lines(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    fn(line, lineno);
  }
}

std::pair<std::string, std::string> split_tab(const std::string& line, const std::filesystem::path& path,
                                              std::size_t lineno) {
  auto tab = line.find('\t');
  if (tab == std::string::npos)
    throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected two tab-separated columns");
  return {unicode::to_lower(trim(line.substr(0, tab))), trim(line.substr(tab + 1))};
}

void load_pairs(const std::optional<std::filesystem::path>& path, std::unordered_map<std::string, std::string>& out,
                bool lowercase_value) {
  if (!path) return;
  read_lines(*path, [&](const std::string& line, std::size_t lineno) {
    auto [k, v] = split_tab(line, *path, lineno);
    out[k] = lowercase_value ? unicode::to_lower(v) : v;
  });
}

void load_set(const std::optional<std::filesystem::path>& path, std::unordered_set<std::string>& out) {
  if (!path) return;
  read_lines(*path, [&](const std::string& line, std::size_t) { out.insert(unicode::to_lower(line)); });
}

std::optional<std::filesystem::path> if_exists(const std::filesystem::path& p) {
  if (std::filesystem::exists(p)) return p;
  return std::nullopt;
}

template <typename Map>
std::map<std::string, std::string> sorted_strings(const Map& m) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : m) {
    if constexpr (std::is_same_v<typename Map::mapped_type, PosTag>) out[k] = to_string(v);
    else out[k] = v;
  }
  return out;
}

std::vector<std::string> sorted(const std::unordered_set<std::string>& s) {
  std::set<std::string> tmp(s.begin(), s.end());
  return {tmp.begin(), tmp.end()};
}

void write_pairs(const std::filesystem::path& path, const std::map<std::string, std::string>& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [k, v] : m) out << k << '\t' << v << '\n';
}

void write_list(const std::filesystem::path& path, const std::vector<std::string>& v) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& s : v) out << s << '\n';
}

}  // namespace

LexiconPaths LexiconPaths::in_directory(const std::filesystem::path& dir) {
  LexiconPaths p;
  p.normalization = if_exists(dir / "normalization.tsv");
  p.lemmas = if_exists(dir / "lemmas.tsv");
  p.pos = if_exists(dir / "pos.tsv");
  p.curse_words = if_exists(dir / "curse_words.txt");
  p.given_names = if_exists(dir / "given_names.txt");
  p.chat_usernames = if_exists(dir / "chat_usernames.txt");
  p.book_names = if_exists(dir / "book_names.txt");
  p.key_lemmas = if_exists(dir / "key_lemmas.txt");
  return p;
}

LexiconSet load_lexicons(const LexiconPaths& paths) {
  LexiconSet lex;
  load_pairs(paths.normalization, lex.normalization, true);
  load_pairs(paths.lemmas, lex.lemmas, true);
  if (paths.pos) {
    read_lines(*paths.pos, [&](const std::string& line, std::size_t lineno) {
      auto [k, v] = split_tab(line, *paths.pos, lineno);
      lex.pos[k] = parse_pos_tag(v);
    });
  }
  load_set(paths.curse_words, lex.curse_words);
  load_set(paths.given_names, lex.given_names);
  load_set(paths.chat_usernames, lex.chat_usernames);
  load_set(paths.book_names, lex.book_names);
  load_set(paths.key_lemmas, lex.key_lemmas);
  return lex;
}

void save_lexicons(const LexiconSet& lex, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_pairs(dir / "normalization.tsv", sorted_strings(lex.normalization));
  write_pairs(dir / "lemmas.tsv", sorted_strings(lex.lemmas));
  write_pairs(dir / "pos.tsv", sorted_strings(lex.pos));
  write_list(dir / "curse_words.txt", sorted(lex.curse_words));
  write_list(dir / "given_names.txt", sorted(lex.given_names));
  write_list(dir / "chat_usernames.txt", sorted(lex.chat_usernames));
  write_list(dir / "book_names.txt", sorted(lex.book_names));
  write_list(dir / "key_lemmas.txt", sorted(lex.key_lemmas));
}

nlohmann::json lexicons_to_json(const LexiconSet& lex) {
  return {{"normalization", sorted_strings(lex.normalization)},
          {"lemmas", sorted_strings(lex.lemmas)},
          {"pos", sorted_strings(lex.pos)},
          {"curse_words", sorted(lex.curse_words)},
          {"given_names", sorted(lex.given_names)},
          {"chat_usernames", sorted(lex.chat_usernames)},
          {"book_names", sorted(lex.book_names)},
          {"key_lemmas", sorted(lex.key_lemmas)}};
}

LexiconSet lexicons_from_json(const nlohmann::json& doc) {
  LexiconSet lex;
  auto pairs = [&](const char* key, std::unordered_map<std::string, std::string>& out) {
    if (!doc.contains(key)) return;
    for (const auto& [k, v] : doc.at(key).items()) out[unicode::to_lower(k)] = unicode::to_lower(v.get<std::string>());
  };
  auto set = [&](const char* key, std::unordered_set<std::string>& out) {
    if (!doc.contains(key)) return;
    for (const auto& v : doc.at(key)) out.insert(unicode::to_lower(v.get<std::string>()));
  };
  try {
    pairs("normalization", lex.normalization);
    pairs("lemmas", lex.lemmas);
    if (doc.contains("pos"))
      for (const auto& [k, v] : doc.at("pos").items()) lex.pos[unicode::to_lower(k)] = parse_pos_tag(v.get<std::string>());
    set("curse_words", lex.curse_words);
    set("given_names", lex.given_names);
    set("chat_usernames", lex.chat_usernames);
    set("book_names", lex.book_names);
    set("key_lemmas", lex.key_lemmas);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("lexicon json: ") + e.what());
  }
  return lex;
}

}  // namespace msgclass
