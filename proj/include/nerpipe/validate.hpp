#pragma once

// Quality gates for paraphrase variants: placeholder-count check and
// cosine similarity between the masked original and the masked variant.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerpipe/mask.hpp"

namespace nerpipe::validate {

// Maps a batch of texts to vectors. Vectors are only comparable within one
// call. Implementations must be safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) const = 0;
};

// Lowercased term-frequency vectors over the batch vocabulary. Placeholder
// tokens are dropped and ASCII punctuation is stripped from token edges.
class TermFrequencyEmbedder final : public Embedder {
 public:
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;
};

struct TagCountCheck {
  bool ok = false;
  std::size_t found = 0;
};

TagCountCheck check_tag_count(const mask::MaskedTemplate& tmpl, std::string_view variant_text);

// Cosine similarity clamped to [0, 1]. Two texts with no content tokens
// score 1; one empty side scores 0.
double semantic_similarity(std::string_view original, std::string_view variant,
                           const Embedder& embedder);

enum class Verdict { Accept, Retry, Fallback };
std::string_view to_string(Verdict verdict);

struct ValidationConfig {
  double similarity_threshold = 0.80;
  // When set, a variant whose tags are intact but whose similarity is low
  // gets Fallback instead of Retry.
  bool positional_fallback = false;
};

struct ValidationOutcome {
  bool tag_count_ok = false;
  double similarity = 0.0;
  bool similarity_ok = false;
  Verdict verdict = Verdict::Retry;
};

// Similarity compares the rendered template with the variant text, both in
// masked form. It is not computed when the tag gate fails.
ValidationOutcome validate_variant(const mask::MaskedTemplate& tmpl, std::string_view variant_text,
                                   const ValidationConfig& config, const Embedder& embedder);

}  // namespace nerpipe::validate
