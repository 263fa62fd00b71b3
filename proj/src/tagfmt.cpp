#include "nerpipe/tagfmt.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "nerpipe/error.hpp"

namespace nerpipe::tagfmt {

namespace {

void require_same_length(std::size_t tokens, std::size_t tags) {
  if (tokens != tags)
    throw std::invalid_argument("tag count " + std::to_string(tags) + " does not match token count " +
                                std::to_string(tokens));
}

}  // namespace

TagSequence spans_to_bio(const AnnotatedSentence& sentence) {
  TagSequence out{std::vector<std::string>(sentence.tokens.size(), "O"), TagScheme::Bio};
  for (const EntitySpan& span : sentence.spans) {
    out.tags[span.start] = "B-" + span.label;
    for (std::size_t i = span.start + 1; i < span.end; ++i) out.tags[i] = "I-" + span.label;
  }
  return out;
}

std::vector<EntitySpan> bio_to_spans(std::span<const std::string> tokens, const TagSequence& tags) {
  require_same_length(tokens.size(), tags.tags.size());
  std::vector<EntitySpan> spans;
  bool open = false;
  for (std::size_t i = 0; i < tags.tags.size(); ++i) {
    const std::string& tag = tags.tags[i];
    if (tag == "O") {
      open = false;
      continue;
    }
    if (tag.size() < 3 || tag[1] != '-' || (tag[0] != 'B' && tag[0] != 'I'))
      throw TagFormatError(tag, i);
    std::string label = tag.substr(2);
    if (label == "O") throw TagFormatError(tag, i);
    if (tag[0] == 'I' && open && spans.back().label == label) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({i, i + 1, std::move(label)});
      open = true;
    }
  }
  return spans;
}

TagSequence spans_to_flat(const AnnotatedSentence& sentence) {
  TagSequence out{std::vector<std::string>(sentence.tokens.size(), "O"), TagScheme::Flat};
  for (const EntitySpan& span : sentence.spans)
    for (std::size_t i = span.start; i < span.end; ++i) out.tags[i] = span.label;
  return out;
}

std::string render_slash(std::span<const std::string> words, std::span<const std::string> tags) {
  require_same_length(words.size(), tags.size());
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    out += words[i];
    out += '/';
    out += tags[i];
  }
  return out;
}

std::string spans_to_slash(const AnnotatedSentence& sentence) {
  return render_slash(sentence.tokens, spans_to_flat(sentence).tags);
}

SlashParse slash_to_tags(std::string_view output) noexcept {
  SlashParse result;
  try {
    std::string_view text = trim(output);
    // A sentence-final period glued to the last tag ("Tuesday/O.").
    if (!text.empty() && text.back() == '.') {
      const std::size_t slash = text.rfind('/');
      const std::size_t sep = text.find_last_of(" \t\n\r,");
      if (slash != std::string_view::npos && (sep == std::string_view::npos || slash > sep) &&
          slash + 2 < text.size())
        text = trim(text.substr(0, text.size() - 1));
    }

    auto take_item = [&result](std::string_view item) {
      item = trim(item);
      if (item.empty()) {
        ++result.irregular;
        return;
      }
      const std::size_t slash = item.rfind('/');
      if (slash == std::string_view::npos) {
        result.items.push_back({std::string(item), "O"});
        ++result.irregular;
        return;
      }
      std::string_view word = trim(item.substr(0, slash));
      std::string_view tag = trim(item.substr(slash + 1));
      if (word.empty()) {
        ++result.irregular;
        return;
      }
      if (tag.empty()) {
        result.items.push_back({std::string(word), "O"});
        ++result.irregular;
        return;
      }
      result.items.push_back({std::string(word), std::string(tag)});
    };

    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
      std::size_t sep = text.find(", ", pos);
      std::string_view piece =
          text.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
      // Space-separated output ("x1/y1 x2/y2") splits further on whitespace.
      std::vector<std::string> words = split_whitespace(piece);
      if (words.empty()) {
        take_item(piece);
      } else {
        for (const std::string& w : words) take_item(w);
      }
      if (sep == std::string_view::npos) break;
      pos = sep + 2;
    }
  } catch (...) {
    // Only allocation can fail above; report what was parsed so far.
    ++result.irregular;
  }
  return result;
}

TagSequence align_predictions(std::span<const std::string> gold_tokens,
                              std::span<const WordTag> predicted, TagScheme scheme) {
  const std::size_t n = gold_tokens.size();
  const std::size_t m = predicted.size();
  TagSequence out{std::vector<std::string>(n, "O"), scheme};
  if (n == 0 || m == 0) return out;

  // lcs[i][j] = LCS length of gold[i..] and predicted[j..].
  std::vector<std::uint32_t> lcs((n + 1) * (m + 1), 0);
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[at(i, j)] = gold_tokens[i] == predicted[j].word
                          ? lcs[at(i + 1, j + 1)] + 1
                          : std::max(lcs[at(i + 1, j)], lcs[at(i, j + 1)]);
    }
  }
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (gold_tokens[i] == predicted[j].word && lcs[at(i, j)] == lcs[at(i + 1, j + 1)] + 1) {
      out.tags[i] = predicted[j].tag;
      ++i;
      ++j;
    } else if (lcs[at(i + 1, j)] >= lcs[at(i, j + 1)]) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

std::vector<EntitySpan> flat_tags_to_spans(std::span<const std::string> tokens,
                                           const TagSequence& tags) {
  require_same_length(tokens.size(), tags.tags.size());
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < tags.tags.size(); ++i) {
    const std::string& tag = tags.tags[i];
    if (tag == "O" || tag.empty()) continue;
    if (!spans.empty() && spans.back().end == i && spans.back().label == tag) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({i, i + 1, tag});
    }
  }
  return spans;
}

}  // namespace nerpipe::tagfmt
