#pragma once

// Entity masking for paraphrase prompts: entity spans become typed
// placeholders such as <<PER>>, and entity surfaces are re-injected into
// paraphrased variants afterwards.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nerpipe/types.hpp"

namespace nerpipe::mask {

struct PlainText {
  std::string text;
  bool operator==(const PlainText&) const = default;
};

struct Placeholder {
  std::size_t ordinal = 0;  // position among all placeholders
  std::string label;
  bool operator==(const Placeholder&) const = default;
};

using TemplatePart = std::variant<PlainText, Placeholder>;

struct MaskedEntity {
  std::size_t ordinal = 0;
  std::string label;
  std::string surface;  // entity tokens joined by single spaces
  EntitySpan original_span;
  bool operator==(const MaskedEntity&) const = default;
};

struct MaskedTemplate {
  std::vector<TemplatePart> parts;
  std::vector<MaskedEntity> entities;
  std::string parent_id;
  std::string source;
  bool operator==(const MaskedTemplate&) const = default;
};

// Each span becomes one placeholder, so a multi-word entity is masked once.
// Throws MaskError when the sentence has no spans.
MaskedTemplate mask_entities(const AnnotatedSentence& sentence);

// Placeholders render as <<LABEL>>; a label that occurs more than once
// renders as <<LABEL#k>> with k counting from 1 within that label.
std::string render_template(const MaskedTemplate& tmpl);

// Debug form: {"parts": [...], "entities": [...], "parent_id": "..."}.
std::string template_to_json(const MaskedTemplate& tmpl);

struct PlaceholderMatch {
  std::size_t begin = 0;  // byte offsets of the full <<...>> token
  std::size_t end = 0;
  std::string label;
  std::optional<std::size_t> label_ordinal;  // from a #k suffix
};

std::vector<PlaceholderMatch> find_placeholders(std::string_view text);

// Placeholder tokens replaced by single spaces.
std::string strip_placeholders(std::string_view text);

// Substitutes recorded surfaces for the placeholders of an untrusted
// variant and re-tokenizes on whitespace; placeholder edges are also token
// boundaries. Unsuffixed placeholders of a repeated label take that label's
// entities left to right. The new id is "<parent_id>::v<variant_number>".
// Throws MismatchError or UnknownLabelError.
AnnotatedSentence reinject_entities(std::string_view variant_text, const MaskedTemplate& tmpl,
                                    std::size_t variant_number = 1);

}  // namespace nerpipe::mask
