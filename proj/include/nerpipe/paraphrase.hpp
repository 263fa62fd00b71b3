#pragma once

// Entity-preserving paraphrase augmentation: mask, prompt an LLM, parse the
// variants, re-inject entities, validate, and regenerate the shortfall.

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerpipe/llm.hpp"
#include "nerpipe/types.hpp"
#include "nerpipe/validate.hpp"

namespace nerpipe::paraphrase {

struct ParaphraseConfig {
  std::size_t n_variants = 2;
  std::size_t max_retries = 2;
  std::vector<double> temperature_schedule{0.7, 1.0, 1.2};
  double similarity_threshold = 0.80;
  std::chrono::milliseconds request_timeout{60000};
  std::size_t max_parallel_requests = 4;
  std::string model = "llama-3.3-70b-instruct";
  int max_tokens = 1024;
  // Ask for all n variants on every attempt instead of only the missing ones.
  bool full_regeneration = false;
  // Keep variants whose tags are intact but whose similarity is low.
  bool positional_fallback = false;

  // Throws ConfigError when an invariant does not hold.
  void check() const;
};

// The paraphrasing prompt with the variant count and the masked sentence
// substituted. Byte-stable for fixed inputs.
std::string build_paraphrase_prompt(std::string_view template_text, std::size_t n_variants);

// System message describing the expected JSON document.
const std::string& response_schema_message();

// Accepts {"variants": [...]} or a bare array of strings, optionally inside a
// ``` fence. Throws ResponseParseError or CountError.
std::vector<std::string> parse_variants(std::string_view response_text, std::size_t expected);

enum class Outcome { Success, PartialSuccess, Failed, Skipped };
std::string_view to_string(Outcome outcome);

struct VariantScore {
  std::size_t attempt = 0;  // 1-based
  std::string text;         // variant as returned, in masked form
  double similarity = 0.0;
  validate::Verdict verdict = validate::Verdict::Retry;
  bool kept = false;
  std::string error;  // re-injection failure, if any
};

struct AugmentationRecord {
  std::string parent_id;
  std::vector<AnnotatedSentence> variants;
  std::size_t attempts = 0;
  Outcome outcome = Outcome::Failed;
  std::string failure_reason;  // "transport" or "validation" when Failed
  std::vector<VariantScore> scores;
  bool first_attempt_ok = false;
};

// Requires at least one span (throws MaskError otherwise).
AugmentationRecord augment_sentence(const AnnotatedSentence& sentence,
                                    const ParaphraseConfig& config, llm::LlmClient& client,
                                    const validate::Embedder& embedder);

struct AugmentationSummary {
  std::size_t inputs = 0;
  std::size_t augmentable = 0;  // sentences with at least one span
  std::size_t skipped = 0;
  std::size_t succeeded = 0;
  std::size_t partial = 0;
  std::size_t failed = 0;
  std::size_t variants_kept = 0;
  std::size_t variants_rejected = 0;
  std::size_t first_attempt_failures = 0;  // sentences not complete after attempt 1
  std::size_t regenerations = 0;           // attempts beyond the first

  double failure_rate() const;
  double first_attempt_failure_rate() const;
  bool operator==(const AugmentationSummary&) const = default;
};

struct CorpusAugmentation {
  std::vector<AugmentationRecord> records;  // input order
  AugmentationSummary summary;
};

// Runs augment_sentence over the corpus with at most
// config.max_parallel_requests sentences in flight. Sentences without spans
// get a Skipped record. Per-sentence failures are recorded, never thrown.
CorpusAugmentation augment_corpus(std::span<const AnnotatedSentence> sentences,
                                  const ParaphraseConfig& config, llm::LlmClient& client,
                                  const validate::Embedder& embedder);

std::string record_to_json(const AugmentationRecord& record);
std::string summary_to_json(const AugmentationSummary& summary);

}  // namespace nerpipe::paraphrase
