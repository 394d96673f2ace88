#include "msgclass/textnorm.hpp"

#include "msgclass/error.hpp"
#include "msgclass/unicode.hpp"

namespace msgclass {

namespace {

using unicode::CodePoint;

std::string slice(std::string_view text, const std::vector<CodePoint>& cps, std::size_t begin, std::size_t end) {
  if (begin >= end) return {};
  std::size_t from = cps[begin].offset;
  std::size_t to = cps[end - 1].offset + cps[end - 1].length;
  return std::string(text.substr(from, to - from));
}

// Emits tokens for one whitespace-free segment that contains no symbols.
void split_segment(std::string_view text, const std::vector<CodePoint>& cps, std::size_t begin, std::size_t end,
                   std::vector<Token>& out) {
  std::size_t lead = begin;
  while (lead < end && unicode::is_punct(cps[lead].value)) ++lead;
  std::size_t trail = end;
  while (trail > lead && unicode::is_punct(cps[trail - 1].value)) --trail;
  for (std::size_t i = begin; i < lead; ++i) out.push_back({slice(text, cps, i, i + 1), TokenKind::Punct, cps[i].offset});
  if (lead < trail) out.push_back({slice(text, cps, lead, trail), TokenKind::Word, cps[lead].offset});
  for (std::size_t i = trail; i < end; ++i) out.push_back({slice(text, cps, i, i + 1), TokenKind::Punct, cps[i].offset});
}

std::string collapse_impl(std::string_view token, bool letters_only) {
  std::string out;
  out.reserve(token.size());
  char32_t prev = 0;
  bool have_prev = false;
  for (const auto& cp : unicode::decode(token)) {
    bool repeat = have_prev && cp.value == prev && (!letters_only || unicode::is_letter(cp.value));
    if (!repeat) unicode::append_utf8(out, cp.value);
    prev = cp.value;
    have_prev = true;
  }
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  const auto cps = unicode::decode(text);
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    if (unicode::is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t chunk_end = i;
    while (chunk_end < n && !unicode::is_space(cps[chunk_end].value)) ++chunk_end;
    std::size_t seg = i;
    for (std::size_t j = i; j < chunk_end; ++j) {
      if (!unicode::is_symbol(cps[j].value)) continue;
      split_segment(text, cps, seg, j, out);
      out.push_back({slice(text, cps, j, j + 1), TokenKind::Symbol, cps[j].offset});
      seg = j + 1;
    }
    split_segment(text, cps, seg, chunk_end, out);
    i = chunk_end;
  }
  return out;
}

std::string collapse_repeats(std::string_view token) { return collapse_impl(token, false); }
std::string collapse_letter_repeats(std::string_view token) { return collapse_impl(token, true); }

std::string_view to_string(PosCategory c) { return kPosCategoryNames[static_cast<std::size_t>(c)]; }

PosCategory parse_pos_category(std::string_view name) {
  for (std::size_t i = 0; i < kPosCategoryNames.size(); ++i)
    if (kPosCategoryNames[i] == name) return static_cast<PosCategory>(i);
  if (name == "unknown") return PosCategory::Residual;
  throw DataError("unknown POS category '" + std::string(name) + "'");
}

std::string to_string(const PosTag& tag) { return std::string(to_string(tag.category)) + ":" + tag.subtype; }

PosTag parse_pos_tag(std::string_view text) {
  auto colon = text.find(':');
  PosTag tag;
  tag.category = parse_pos_category(text.substr(0, colon));
  tag.subtype = colon == std::string_view::npos || colon + 1 == text.size() ? "unknown"
                                                                             : std::string(text.substr(colon + 1));
  return tag;
}

const std::string& LexiconSet::standardize(const std::string& token) const {
  auto it = normalization.find(token);
  return it == normalization.end() ? token : it->second;
}

const std::string& LexiconSet::lemma(const std::string& token) const {
  auto it = lemmas.find(token);
  return it == lemmas.end() ? token : it->second;
}

PosTag LexiconSet::tag(const std::string& token) const {
  auto it = pos.find(token);
  return it == pos.end() ? PosTag::unknown() : it->second;
}

std::vector<std::string> normalize(std::string_view text, const LexiconSet& lexicons, NormalizeStages stages) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(text)) {
    std::string word = stages.lowercase ? unicode::to_lower(tok.text) : tok.text;
    if (stages.drop_punct) {
      if (tok.kind != TokenKind::Word) continue;
      std::string kept;
      for (const auto& cp : unicode::decode(word))
        if (!unicode::is_punct(cp.value) && !unicode::is_symbol(cp.value)) unicode::append_utf8(kept, cp.value);
      word = std::move(kept);
    }
    if (stages.collapse) word = collapse_letter_repeats(word);
    if (word.empty()) continue;
    if (stages.standardize) word = lexicons.standardize(word);
    // A standard form may span several words ("nevem" -> "ne vem").
    std::size_t start = 0;
    while (start <= word.size()) {
      auto space = word.find(' ', start);
      std::string part = word.substr(start, space == std::string::npos ? std::string::npos : space - start);
      if (!part.empty()) out.push_back(stages.lemmatize ? lexicons.lemma(part) : part);
      if (space == std::string::npos) break;
      start = space + 1;
    }
  }
  return out;
}

std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens, const LexiconSet& lexicons) {
  std::vector<PosTag> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lexicons.tag(t));
  return out;
}

std::vector<PosTag> parse_pos_column(std::string_view column) {
  std::vector<PosTag> out;
  std::size_t i = 0;
  while (i < column.size()) {
    while (i < column.size() && (column[i] == ' ' || column[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < column.size() && column[j] != ' ' && column[j] != '\t') ++j;
    if (j > i) out.push_back(parse_pos_tag(column.substr(i, j - i)));
    i = j;
  }
  return out;
}

}  // namespace msgclass
