#pragma once

// Entity-level evaluation: a prediction counts only when label, start and
// end all match a gold span.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerpipe/types.hpp"

namespace nerpipe::eval {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct Scores {
  Counts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const Scores&) const = default;
};

// Zero denominators give 0 for the affected metric.
Scores make_scores(const Counts& counts);

using LabelCounts = std::map<std::string, Counts>;

// Predicted spans are deduplicated and labels trimmed before matching.
LabelCounts score_sentence(const AnnotatedSentence& gold, std::span<const EntitySpan> predicted);

struct EvalReport {
  std::map<std::string, Scores> per_label;
  Scores micro;
  std::size_t n_sentences = 0;
  std::size_t irregular_outputs = 0;

  bool operator==(const EvalReport&) const = default;
};

enum class OutputFormat { Flat, Bio };

// Flat: "w/LABEL" items. Bio: the same item syntax with O/B-X/I-X tags.
// Tags with an invalid BIO shape count as irregular and are read as O.
std::vector<EntitySpan> predicted_spans(std::span<const std::string> gold_tokens,
                                        std::string_view generation, OutputFormat format,
                                        std::size_t& irregular);

// Missing generations count every gold span as a false negative. Throws
// EvalError for a generation id that is not in gold.
EvalReport evaluate_generations(std::span<const AnnotatedSentence> gold,
                                const std::map<std::string, std::string>& generations,
                                OutputFormat format);

enum class ReportFormat { Text, Json };

// Text tables show percentages with one decimal place.
std::string render_report(const EvalReport& report, ReportFormat format);
EvalReport report_from_json(std::string_view json_text);

// {"id": ..., "output": ...} per line.
std::map<std::string, std::string> parse_generations_jsonl(std::string_view text);
// Gold rendered as model output, one JSONL record per sentence.
std::string render_generations(std::span<const AnnotatedSentence> gold, OutputFormat format);

}  // namespace nerpipe::eval
