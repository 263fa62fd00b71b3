#include "nerpipe/corpus.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "json_util.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/io.hpp"
#include "nerpipe/tagfmt.hpp"

namespace nerpipe::corpus {

using detail::ojson;

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    out.emplace_back(trim(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos)));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

AnnotatedSentence sentence_from_json(const nlohmann::json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError("record is not a JSON object", line);
  auto it = obj.find("id");
  if (it == obj.end() || !it->is_string()) throw ParseError("missing string field 'id'", line);
  AnnotatedSentence s;
  s.id = it->get<std::string>();

  it = obj.find("tokens");
  if (it == obj.end() || !it->is_array())
    throw InvariantError(s.id, "missing array field 'tokens'");
  for (const auto& tok : *it) {
    if (!tok.is_string()) throw InvariantError(s.id, "token is not a string");
    s.tokens.push_back(tok.get<std::string>());
  }

  it = obj.find("spans");
  if (it == obj.end() || !it->is_array()) throw InvariantError(s.id, "missing array field 'spans'");
  for (const auto& sp : *it) {
    if (!sp.is_object()) throw InvariantError(s.id, "span is not an object");
    auto start = sp.find("start");
    auto end = sp.find("end");
    auto label = sp.find("label");
    if (start == sp.end() || !start->is_number_unsigned() || end == sp.end() ||
        !end->is_number_unsigned())
      throw InvariantError(s.id, "span bounds must be non-negative integers");
    if (label == sp.end() || !label->is_string())
      throw InvariantError(s.id, "span label must be a string");
    s.spans.push_back({start->get<std::size_t>(), end->get<std::size_t>(),
                       label->get<std::string>()});
  }

  it = obj.find("source");
  if (it != obj.end()) {
    if (!it->is_string()) throw InvariantError(s.id, "'source' must be a string");
    s.source = it->get<std::string>();
  }
  check_sentence(s);
  return s;
}

bool is_ascii_letter(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

constexpr std::array<std::string_view, 48> kStopwords = {
    "the",  "a",    "an",   "and",  "or",   "but",   "of",    "to",    "in",    "on",
    "at",   "for",  "with", "by",   "from", "is",    "are",   "was",   "were",  "be",
    "been", "it",   "its",  "this", "that", "these", "those", "he",    "she",   "they",
    "we",   "you",  "i",    "his",  "her",  "their", "has",   "have",  "had",   "not",
    "as",   "which", "who", "will", "would", "there", "also", "into"};

}  // namespace

std::vector<AnnotatedSentence> parse_conll(std::string_view text, const ConllOptions& options) {
  std::vector<AnnotatedSentence> out;
  std::vector<std::string> tokens, tags;
  std::vector<std::size_t> tag_lines;

  auto flush = [&]() {
    if (tokens.empty()) return;
    AnnotatedSentence s;
    s.id = options.source + "#" + std::to_string(out.size());
    s.source = options.source;
    try {
      s.spans = tagfmt::bio_to_spans(tokens, {tags, tagfmt::TagScheme::Bio});
    } catch (const TagFormatError& e) {
      throw ParseError(e.what(), tag_lines[e.position()]);
    }
    s.tokens = std::move(tokens);
    out.push_back(std::move(s));
    tokens.clear();
    tags.clear();
    tag_lines.clear();
  };

  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    std::string_view line = lines[n];
    if (trim(line).empty()) {
      flush();
      continue;
    }
    std::vector<std::string> cols = options.separator == ColumnSeparator::Tab
                                        ? split_tabs(line)
                                        : split_whitespace(line);
    if (cols.front() == "-DOCSTART-") continue;
    const bool bad_count =
        options.columns == 0 ? cols.size() < 2 : cols.size() != options.columns;
    if (bad_count)
      throw ParseError("expected " +
                           (options.columns == 0 ? std::string("at least 2")
                                                 : std::to_string(options.columns)) +
                           " columns, found " + std::to_string(cols.size()),
                       line_no);
    if (cols.front().empty() || split_whitespace(cols.front()).size() != 1)
      throw ParseError("token must be non-empty and contain no whitespace", line_no);
    tokens.push_back(cols.front());
    tags.push_back(cols.back());
    tag_lines.push_back(line_no);
  }
  flush();
  return out;
}

std::vector<AnnotatedSentence> parse_jsonl(std::string_view text) {
  std::vector<AnnotatedSentence> out;
  std::unordered_set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    auto obj = nlohmann::json::parse(lines[n], nullptr, false);
    if (obj.is_discarded()) throw ParseError("malformed JSON", n + 1);
    AnnotatedSentence s = sentence_from_json(obj, n + 1);
    if (!seen.insert(s.id).second) throw InvariantError(s.id, "duplicate id");
    out.push_back(std::move(s));
  }
  return out;
}

std::string to_jsonl_line(const AnnotatedSentence& s) {
  ojson spans = ojson::array();
  for (const EntitySpan& sp : s.spans) {
    ojson o;
    o["start"] = sp.start;
    o["end"] = sp.end;
    o["label"] = sp.label;
    spans.push_back(std::move(o));
  }
  ojson obj;
  obj["id"] = s.id;
  obj["tokens"] = s.tokens;
  obj["spans"] = std::move(spans);
  obj["source"] = s.source;
  return detail::dump_compact(obj);
}

std::string emit_jsonl(std::span<const AnnotatedSentence> sentences) {
  std::string out;
  for (const auto& s : sentences) {
    out += to_jsonl_line(s);
    out += '\n';
  }
  return out;
}

std::vector<AnnotatedSentence> read_corpus(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return parse_jsonl(text);
  ConllOptions options;
  options.source = path.stem().string();
  options.columns = 0;
  return parse_conll(text, options);
}

LabelSchema parse_schema(std::string_view json_text, std::string name) {
  auto doc = ojson::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("malformed schema JSON", 1);
  if (!doc.is_object()) throw SchemaError("schema must be a JSON object of labels", "");
  LabelSchema schema(std::move(name));
  auto text_field = [](const ojson& entry, const char* lower, const char* upper) -> std::string {
    for (const char* key : {lower, upper}) {
      auto it = entry.find(key);
      if (it != entry.end() && it->is_string()) return it->get<std::string>();
    }
    return {};
  };
  for (const auto& [label, entry] : doc.items()) {
    if (!entry.is_object()) throw SchemaError("entry for '" + label + "' must be an object", label);
    schema.add(label, {text_field(entry, "definition", "DEFINITION"),
                       text_field(entry, "guidelines", "GUIDELINES")});
  }
  return schema;
}

LabelSchema load_schema(const std::filesystem::path& path) {
  return parse_schema(read_file(path), path.stem().string());
}

std::string schema_to_json(const LabelSchema& schema) {
  ojson doc = ojson::object();
  for (const auto& [label, entry] : schema.entries()) {
    ojson e;
    e["definition"] = entry.definition;
    e["guidelines"] = entry.guidelines;
    doc[label] = std::move(e);
  }
  return detail::dump_pretty(doc);
}

bool looks_english(const AnnotatedSentence& sentence) {
  std::size_t word_like = 0, ascii_words = 0;
  bool has_stopword = false;
  for (const std::string& tok : sentence.tokens) {
    bool any_letter = false, all_ascii = true;
    for (unsigned char c : tok) {
      if (c >= 0x80) {
        all_ascii = false;
        any_letter = true;
      } else if (is_ascii_letter(c)) {
        any_letter = true;
      }
    }
    if (!any_letter) continue;  // punctuation and numbers do not vote
    ++word_like;
    if (all_ascii) ++ascii_words;
    if (!has_stopword && all_ascii) {
      std::string lower(tok);
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      has_stopword = std::find(kStopwords.begin(), kStopwords.end(), lower) != kStopwords.end();
    }
  }
  if (word_like == 0) return false;
  return has_stopword && ascii_words * 10 >= word_like * 9;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::MinWords: return "min_words";
    case RejectReason::NotEnglish: return "english";
    case RejectReason::LabelAllowlist: return "label_allowlist";
    case RejectReason::NoEntities: return "no_entities";
  }
  return "unknown";
}

FilterResult filter_corpus(std::span<const AnnotatedSentence> sentences,
                           const FilterOptions& options) {
  if (options.min_words < 1) throw std::invalid_argument("min_words must be at least 1");
  FilterResult result;
  for (const AnnotatedSentence& s : sentences) {
    if (s.tokens.size() < options.min_words) {
      result.rejected.push_back({s, RejectReason::MinWords});
      continue;
    }
    if (options.english_only && !(options.detector ? options.detector(s) : looks_english(s))) {
      result.rejected.push_back({s, RejectReason::NotEnglish});
      continue;
    }
    AnnotatedSentence kept = s;
    if (options.label_allowlist) {
      const auto& allow = *options.label_allowlist;
      std::erase_if(kept.spans, [&allow](const EntitySpan& sp) { return !allow.contains(sp.label); });
      if (!s.spans.empty() && kept.spans.empty()) {
        result.rejected.push_back({s, RejectReason::LabelAllowlist});
        continue;
      }
    }
    if (options.drop_without_entities && kept.spans.empty()) {
      result.rejected.push_back({s, RejectReason::NoEntities});
      continue;
    }
    result.kept.push_back(std::move(kept));
  }
  return result;
}

std::vector<AnnotatedSentence> sample_corpus(std::span<const AnnotatedSentence> sentences,
                                             std::size_t n, std::uint64_t seed) {
  if (n > sentences.size())
    throw std::invalid_argument("cannot sample " + std::to_string(n) + " from " +
                                std::to_string(sentences.size()) + " sentences");
  std::vector<AnnotatedSentence> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  std::sample(sentences.begin(), sentences.end(), std::back_inserter(out), n, rng);
  return out;
}

}  // namespace nerpipe::corpus
