#include "wta/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wta {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string strip_edge_punct(std::string_view tok) {
  std::size_t b = 0;
  std::size_t e = tok.size();
  auto is_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  while (b < e && is_punct(tok[b])) ++b;
  while (e > b && is_punct(tok[e - 1])) --e;
  return std::string(tok.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

int token_count(std::string_view text) { return static_cast<int>(tokenize(text).size()); }

std::string normalize(std::string_view text) {
  auto toks = tokenize(text);
  for (auto& t : toks) t = lower(std::move(t));
  return join(toks, " ");
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) {
    auto s = lower(strip_edge_punct(t));
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

bool contains_token_seq(std::string_view haystack, std::string_view needle) {
  const auto h = normalized_tokens(haystack);
  const auto n = normalized_tokens(needle);
  if (n.empty() || n.size() > h.size()) return false;
  for (std::size_t i = 0; i + n.size() <= h.size(); ++i) {
    if (std::equal(n.begin(), n.end(), h.begin() + static_cast<std::ptrdiff_t>(i)))
      return true;
  }
  return false;
}

bool contains_digit(std::string_view text) {
  return std::any_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::optional<double> parse_number(std::string_view text) {
  for (const auto& raw : tokenize(text)) {
    std::string cleaned;
    for (char c : raw) {
      if (c == ',' || c == '$' || c == '%') continue;
      cleaned.push_back(c);
    }
    cleaned = strip_edge_punct(cleaned);
    if (cleaned.empty()) continue;
    double value = 0.0;
    const char* first = cleaned.data();
    const char* last = first + cleaned.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) return value;
  }
  return std::nullopt;
}

bool is_yes_no(std::string_view text) {
  const auto toks = normalized_tokens(text);
  return toks.size() == 1 && (toks[0] == "yes" || toks[0] == "no");
}

bool looks_like_question(std::string_view text) {
  const auto toks = normalized_tokens(text);
  if (toks.empty()) return false;
  static const char* kWh[] = {"who", "what", "when", "where", "why",
                              "how", "which", "whose", "whom", "is",
                              "are", "do", "does", "can", "should"};
  for (const char* w : kWh) {
    if (toks.front() == w) return true;
  }
  const auto trimmed = normalize(text);
  return !trimmed.empty() && trimmed.back() == '?';
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_number(double value) {
  const double rounded = std::round(value);
  if (std::abs(value - rounded) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(rounded));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

}  // namespace wta
