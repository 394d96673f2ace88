#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 and character-class support for Latin, Greek and Cyrillic
// chat text. Invalid bytes decode to U+FFFD one byte at a time.
namespace msgclass::unicode {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset in the source string
  std::size_t length;  // encoded byte length
};

std::vector<CodePoint> decode(std::string_view text);
void append_utf8(std::string& out, char32_t cp);
std::string encode(const std::u32string& cps);
std::u32string to_u32(std::string_view text);

bool is_space(char32_t c);
bool is_digit(char32_t c);
// Fixed ASCII set plus Unicode general category P*.
bool is_punct(char32_t c);
// Unicode S* symbols, emoji, and emoji modifiers/joiners.
bool is_symbol(char32_t c);
bool is_upper(char32_t c);
bool is_letter(char32_t c);
char32_t to_lower(char32_t c);
std::string to_lower(std::string_view text);
char32_t to_upper(char32_t c);
std::string to_upper(std::string_view text);

}  // namespace msgclass::unicode
