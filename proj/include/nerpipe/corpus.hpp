#pragma once

// Corpus ingestion (CoNLL, JSONL), schema loading, filtering and sampling.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerpipe/types.hpp"

namespace nerpipe::corpus {

enum class ColumnSeparator { Whitespace, Tab };

struct ConllOptions {
  std::string source = "conll";
  ColumnSeparator separator = ColumnSeparator::Whitespace;
  // Exact column count required per line. 0 accepts any count >= 2 and
  // reads the token from the first column and the tag from the last one
  // (CoNLL-2003 style four-column files).
  std::size_t columns = 2;
};

// Token-per-line BIO input, blank line between sentences. Ids are
// "<source>#<ordinal>". -DOCSTART- lines are skipped.
std::vector<AnnotatedSentence> parse_conll(std::string_view text, const ConllOptions& options = {});

// One {"id","tokens","spans"[,"source"]} object per line; every record is
// checked against the sentence invariants and ids must be unique.
std::vector<AnnotatedSentence> parse_jsonl(std::string_view text);

// Keys are written in the order id, tokens, spans, source.
std::string to_jsonl_line(const AnnotatedSentence& sentence);
std::string emit_jsonl(std::span<const AnnotatedSentence> sentences);

// Picks the parser from the extension: .jsonl/.json read as JSONL, anything
// else as whitespace-separated CoNLL with the file stem as source.
std::vector<AnnotatedSentence> read_corpus(const std::filesystem::path& path);

// {"LABEL": {"definition": "...", "guidelines": "..."}, ...}; file order is kept.
LabelSchema parse_schema(std::string_view json_text, std::string name);
LabelSchema load_schema(const std::filesystem::path& path);
std::string schema_to_json(const LabelSchema& schema);

using LanguageDetector = std::function<bool(const AnnotatedSentence&)>;

// Heuristic English test: at least 90% of word-like tokens are plain ASCII
// and at least one token is a common English function word.
bool looks_english(const AnnotatedSentence& sentence);

struct FilterOptions {
  std::size_t min_words = 10;
  bool english_only = true;
  std::optional<std::set<std::string>> label_allowlist;
  bool drop_without_entities = false;
  LanguageDetector detector = looks_english;
};

enum class RejectReason { MinWords, NotEnglish, LabelAllowlist, NoEntities };
std::string_view to_string(RejectReason reason);

struct Rejection {
  AnnotatedSentence sentence;
  RejectReason reason;
};

struct FilterResult {
  std::vector<AnnotatedSentence> kept;
  std::vector<Rejection> rejected;
};

// Rules fire in the order min_words, english, allowlist, no_entities; a
// rejection records the first rule that fired. With an allowlist, kept
// sentences lose their non-allowlisted spans, and a sentence whose spans
// were all removed is rejected.
FilterResult filter_corpus(std::span<const AnnotatedSentence> sentences, const FilterOptions& options);

// Uniform sample without replacement, input order preserved. Throws
// std::invalid_argument when n exceeds the corpus size.
std::vector<AnnotatedSentence> sample_corpus(std::span<const AnnotatedSentence> sentences,
                                             std::size_t n, std::uint64_t seed);

}  // namespace nerpipe::corpus
