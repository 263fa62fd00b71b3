#pragma once

// Conversions between entity spans, BIO tags and the word/slash ("flat")
// representation, plus alignment of noisy generations onto gold tokens.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerpipe/types.hpp"

namespace nerpipe::tagfmt {

enum class TagScheme { Bio, Flat };

struct TagSequence {
  std::vector<std::string> tags;
  TagScheme scheme = TagScheme::Flat;

  bool operator==(const TagSequence&) const = default;
};

TagSequence spans_to_bio(const AnnotatedSentence& sentence);

// Maximal B-/I- runs become spans. An I-X that does not continue a run of X
// opens a new span. Throws TagFormatError on a tag that is not O, B-X or I-X,
// and std::invalid_argument when the lengths differ.
std::vector<EntitySpan> bio_to_spans(std::span<const std::string> tokens, const TagSequence& tags);

// Per-token flat tags: the covering span's label, or "O".
TagSequence spans_to_flat(const AnnotatedSentence& sentence);

// "w1/t1, w2/t2, ...". Multi-word entities repeat their label on every word.
std::string spans_to_slash(const AnnotatedSentence& sentence);
std::string render_slash(std::span<const std::string> words, std::span<const std::string> tags);

struct WordTag {
  std::string word;
  std::string tag;

  bool operator==(const WordTag&) const = default;
};

struct SlashParse {
  std::vector<WordTag> items;
  std::size_t irregular = 0;  // items with no slash, empty word or empty tag
};

// Parses an untrusted generation. Items are separated by ", " or by
// whitespace; each item splits on its last '/'. Never throws.
SlashParse slash_to_tags(std::string_view output) noexcept;

// LCS alignment on exact, case-sensitive word text. The result always has
// one tag per gold token; unmatched gold tokens receive "O".
TagSequence align_predictions(std::span<const std::string> gold_tokens,
                              std::span<const WordTag> predicted,
                              TagScheme scheme = TagScheme::Flat);

// Maximal runs of identical non-O tags become spans.
std::vector<EntitySpan> flat_tags_to_spans(std::span<const std::string> tokens,
                                           const TagSequence& tags);

}  // namespace nerpipe::tagfmt
