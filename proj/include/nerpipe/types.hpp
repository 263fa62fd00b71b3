#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nerpipe {

// Half-open token range [start, end) carrying one entity label.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  std::size_t length() const { return end - start; }
  auto operator<=>(const EntitySpan&) const = default;
};

// A tokenized sentence with its entity annotations. Token i is tokens[i];
// the index of a token is its position in the vector.
struct AnnotatedSentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<EntitySpan> spans;
  std::string source;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct GuidelineEntry {
  std::string definition;
  std::string guidelines;

  bool operator==(const GuidelineEntry&) const = default;
};

// Ordered label inventory. Iteration follows insertion order, which is the
// order labels appear in instructions.
class LabelSchema {
 public:
  LabelSchema() = default;
  explicit LabelSchema(std::string name) : name_(std::move(name)) {}

  // Throws SchemaError on an empty, duplicate or "O" label.
  void add(std::string label, GuidelineEntry entry = {});

  bool contains(std::string_view label) const;
  const GuidelineEntry* find(std::string_view label) const;

  const std::string& name() const { return name_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<std::string> labels() const;
  const std::vector<std::pair<std::string, GuidelineEntry>>& entries() const { return entries_; }

 private:
  std::string name_;
  std::vector<std::pair<std::string, GuidelineEntry>> entries_;
};

// Throws InvariantError naming the sentence id when any AnnotatedSentence
// invariant is broken.
void check_sentence(const AnnotatedSentence& sentence);

std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
std::string_view trim(std::string_view text);

}  // namespace nerpipe
