#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace poldyn {

// Decodes UTF-8 into codepoints. Invalid byte sequences decode to U+FFFD,
// one replacement per offending byte.
std::vector<char32_t> utf8_decode(std::string_view s);

void utf8_append(std::string& out, char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

// Whitespace per the tokenizer: ASCII whitespace plus the common Unicode
// space/line separators (NBSP, ogham space, en/em spaces, ideographic space).
bool is_space_cp(char32_t c);

// Punctuation stripped from token edges. '#' and '@' are never stripped.
bool is_strip_punct_cp(char32_t c);

// Splits on whitespace runs, then strips leading/trailing punctuation from
// each token. Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

// '#'-prefixed tokens of the tokenized text with at least one character after
// the '#', ASCII-lowercased, in order of appearance.
std::vector<std::string> extract_hashtags(std::string_view text);

std::string ascii_lower(std::string_view s);

}  // namespace poldyn
