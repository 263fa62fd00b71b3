#include "nerpipe/types.hpp"

#include <algorithm>

#include "nerpipe/error.hpp"

namespace nerpipe {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

void LabelSchema::add(std::string label, GuidelineEntry entry) {
  if (label.empty()) throw SchemaError("empty label name", label);
  if (label == "O") throw SchemaError("'O' is reserved and cannot be a label", label);
  if (contains(label)) throw SchemaError("duplicate label '" + label + "'", label);
  entries_.emplace_back(std::move(label), std::move(entry));
}

bool LabelSchema::contains(std::string_view label) const { return find(label) != nullptr; }

const GuidelineEntry* LabelSchema::find(std::string_view label) const {
  for (const auto& [name, entry] : entries_) {
    if (name == label) return &entry;
  }
  return nullptr;
}

std::vector<std::string> LabelSchema::labels() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& entry : entries_) out.push_back(entry.first);
  return out;
}

void check_sentence(const AnnotatedSentence& s) {
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const std::string& tok = s.tokens[i];
    if (tok.empty()) throw InvariantError(s.id, "token " + std::to_string(i) + " is empty");
    if (std::any_of(tok.begin(), tok.end(), is_space))
      throw InvariantError(s.id, "token " + std::to_string(i) + " contains whitespace");
  }
  std::size_t previous_end = 0;
  for (std::size_t k = 0; k < s.spans.size(); ++k) {
    const EntitySpan& span = s.spans[k];
    const std::string where = "span " + std::to_string(k);
    if (span.label.empty()) throw InvariantError(s.id, where + " has an empty label");
    if (span.label == "O") throw InvariantError(s.id, where + " uses the reserved label 'O'");
    if (span.start >= span.end) throw InvariantError(s.id, where + " is empty or reversed");
    if (span.end > s.tokens.size())
      throw InvariantError(s.id, where + " ends at " + std::to_string(span.end) +
                                     " beyond token count " + std::to_string(s.tokens.size()));
    if (k > 0 && span.start < previous_end)
      throw InvariantError(s.id, where + " overlaps or is out of order");
    previous_end = span.end;
  }
}

std::vector<std::string> split_whitespace(std::string_view text) {
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

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += separator;
    out += parts[i];
  }
  return out;
}

std::string_view trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

}  // namespace nerpipe
