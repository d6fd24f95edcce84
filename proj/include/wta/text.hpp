#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wta {

// Whitespace tokenization is the token unit everywhere: action caps, latency
// scoring, judge rules.
std::vector<std::string> tokenize(std::string_view text);
int token_count(std::string_view text);

// Lowercases, trims, collapses internal whitespace.
std::string normalize(std::string_view text);

// Lowercased tokens with leading/trailing punctuation stripped.
std::vector<std::string> normalized_tokens(std::string_view text);

// True when `needle`'s normalized tokens occur contiguously in `haystack`'s.
bool contains_token_seq(std::string_view haystack, std::string_view needle);

bool contains_digit(std::string_view text);

// Parses the first numeric token, ignoring currency symbols, commas, and
// trailing unit words ("$1,200 total" -> 1200).
std::optional<double> parse_number(std::string_view text);

bool is_yes_no(std::string_view text);

// Interrogative shape: leading wh-word or trailing question mark.
bool looks_like_question(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string format_number(double value);

}  // namespace wta
