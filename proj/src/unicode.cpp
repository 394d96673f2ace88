#include "msgclass/unicode.hpp"

namespace msgclass::unicode {

namespace {

struct Range {
  char32_t lo, hi;
};

template <std::size_t N>
bool in_ranges(char32_t c, const Range (&ranges)[N]) {
  for (const auto& r : ranges)
    if (c >= r.lo && c <= r.hi) return true;
  return false;
}

constexpr Range kPunct[] = {
    {0x21, 0x23},     {0x25, 0x2A},     {0x2C, 0x2F},     {0x3A, 0x3B},     {0x3F, 0x40},     {0x5B, 0x5D},
    {0x5F, 0x5F},     {0x7B, 0x7B},     {0x7D, 0x7D},     {0xA1, 0xA1},     {0xA7, 0xA7},     {0xAB, 0xAB},
    {0xB6, 0xB7},     {0xBB, 0xBB},     {0xBF, 0xBF},     {0x37E, 0x37E},   {0x387, 0x387},   {0x55A, 0x55F},
    {0x589, 0x58A},   {0x2010, 0x2027}, {0x2030, 0x2043}, {0x2045, 0x2051}, {0x2053, 0x205E}, {0x207D, 0x207E},
    {0x208D, 0x208E}, {0x2308, 0x230B}, {0x2329, 0x232A}, {0x2768, 0x2775}, {0x27C5, 0x27C6}, {0x27E6, 0x27EF},
    {0x2983, 0x2998}, {0x29D8, 0x29DB}, {0x29FC, 0x29FD}, {0x2E00, 0x2E4F}, {0x3001, 0x3003}, {0x3008, 0x3011},
    {0x3014, 0x301F}, {0xFE10, 0xFE19}, {0xFE30, 0xFE52}, {0xFE54, 0xFE61}, {0xFE63, 0xFE63}, {0xFE68, 0xFE68},
    {0xFE6A, 0xFE6B}, {0xFF01, 0xFF03}, {0xFF05, 0xFF0A}, {0xFF0C, 0xFF0F}, {0xFF1A, 0xFF1B}, {0xFF1F, 0xFF20},
    {0xFF3B, 0xFF3D}, {0xFF3F, 0xFF3F}, {0xFF5B, 0xFF5B}, {0xFF5D, 0xFF5D}, {0xFF5F, 0xFF65},
};

constexpr Range kSymbol[] = {
    {0x24, 0x24},       {0x2B, 0x2B},       {0x3C, 0x3E},       {0x5E, 0x5E},     {0x60, 0x60},
    {0x7C, 0x7C},       {0x7E, 0x7E},       {0xA2, 0xA6},       {0xA8, 0xA9},     {0xAC, 0xAC},
    {0xAE, 0xB1},       {0xB4, 0xB4},       {0xB8, 0xB8},       {0xD7, 0xD7},     {0xF7, 0xF7},
    {0x200D, 0x200D},   {0x2044, 0x2044},   {0x2052, 0x2052},   {0x20A0, 0x20CF}, {0x2100, 0x2101},
    {0x2103, 0x2106},   {0x2108, 0x2109},   {0x2114, 0x2114},   {0x2116, 0x2118}, {0x211E, 0x2123},
    {0x2125, 0x2125},   {0x2127, 0x2127},   {0x2129, 0x2129},   {0x212E, 0x212E}, {0x2190, 0x2307},
    {0x230C, 0x2328},   {0x232B, 0x23FF},   {0x2400, 0x24FF},   {0x2500, 0x2767}, {0x2776, 0x27C4},
    {0x27C7, 0x27E5},   {0x27F0, 0x2982},   {0x2999, 0x29D7},   {0x29DC, 0x29FB}, {0x29FE, 0x2BFF},
    {0x3030, 0x3030},   {0x303D, 0x303D},   {0x3297, 0x3297},   {0x3299, 0x3299}, {0xFE00, 0xFE0F},
    {0xFFFC, 0xFFFD},   {0x1F000, 0x1FAFF}, {0xE0020, 0xE007F},
};

constexpr Range kSpace[] = {
    {0x09, 0x0D}, {0x20, 0x20}, {0x85, 0x85}, {0xA0, 0xA0}, {0x1680, 0x1680}, {0x2000, 0x200A},
    {0x2028, 0x2029}, {0x202F, 0x202F}, {0x205F, 0x205F}, {0x3000, 0x3000}, {0xFEFF, 0xFEFF},
};

}  // namespace

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char b = s[i];
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b < 0x80) {
      cp = b;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else {
      len = 0;
    }
    bool ok = len > 0 && i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if (!ok) {
      out.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(const std::u32string& cps) {
  std::string out;
  for (char32_t c : cps) append_utf8(out, c);
  return out;
}

std::u32string to_u32(std::string_view text) {
  std::u32string out;
  for (const auto& cp : decode(text)) out.push_back(cp.value);
  return out;
}

bool is_space(char32_t c) { return in_ranges(c, kSpace); }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_punct(char32_t c) { return in_ranges(c, kPunct); }
bool is_symbol(char32_t c) { return in_ranges(c, kSymbol); }

bool is_upper(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  if (c >= 0xC0 && c <= 0xDE) return c != 0xD7;
  if (c >= 0x100 && c <= 0x137) return c % 2 == 0;
  if (c >= 0x139 && c <= 0x148) return c % 2 == 1;
  if (c >= 0x14A && c <= 0x177) return c % 2 == 0;
  if (c == 0x178) return true;
  if (c >= 0x179 && c <= 0x17E) return c % 2 == 1;
  if (c >= 0x391 && c <= 0x3A9) return c != 0x3A2;
  if (c >= 0x400 && c <= 0x42F) return true;
  return false;
}

char32_t to_lower(char32_t c) {
  if (!is_upper(c)) return c;
  if (c <= U'Z') return c + 0x20;
  if (c <= 0xDE) return c + 0x20;
  if (c == 0x178) return 0xFF;
  if (c <= 0x17E) return c + 1;
  if (c <= 0x3A9) return c + 0x20;
  if (c <= 0x40F) return c + 0x50;
  return c + 0x20;
}

char32_t to_upper(char32_t c) {
  if (c == 0xFF) return 0x178;
  for (char32_t delta : {0x20u, 0x1u, 0x50u})
    if (c >= delta && is_upper(c - delta) && to_lower(c - delta) == c) return c - delta;
  return c;
}

bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c < 0xC0) return false;
  return !is_space(c) && !is_punct(c) && !is_symbol(c) && !(c >= 0x2000 && c <= 0x206F);
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& cp : decode(text)) append_utf8(out, to_lower(cp.value));
  return out;
}

std::string to_upper(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& cp : decode(text)) append_utf8(out, to_upper(cp.value));
  return out;
}

}  // namespace msgclass::unicode
