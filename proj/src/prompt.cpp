#include "nerpipe/prompt.hpp"

#include <stdexcept>

#include "json_util.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/io.hpp"
#include "nerpipe/tagfmt.hpp"

namespace nerpipe::prompt {

using detail::ojson;

std::size_t heuristic_token_count(std::string_view text) { return (text.size() + 3) / 4; }

std::size_t count_tokens(std::string_view text, const TokenCounter& counter) {
  return counter ? counter(text) : heuristic_token_count(text);
}

std::string build_instruction(const LabelSchema& schema, bool include_guidelines) {
  if (schema.empty()) throw SchemaError("schema '" + schema.name() + "' has no labels", "");
  std::string out =
      "Task Description:\n"
      "Please analyze the sentence provided, identifying the type of entity for each word on a "
      "token-by-token basis.\n"
      "Each word in the sentence should be annotated with its corresponding named entity tag, "
      "using a forward slash / between the word and the tag. Output format is: word_1/label_1, "
      "word_2/label_2, ...\n"
      "\n"
      "Guideline:\n"
      "1. Use O for words that are not part of any named entity.\n"
      "2. For multi-word entities, label each word with the same entity tag.\n"
      "\n"
      "Use the specific entity tags: ";
  for (const auto& [label, entry] : schema.entries()) {
    out += label;
    out += ", ";
  }
  out += "and O.";
  if (include_guidelines) {
    ojson dict = ojson::object();
    for (const auto& [label, entry] : schema.entries()) {
      ojson e;
      e["DEFINITION"] = entry.definition;
      e["GUIDELINES"] = entry.guidelines;
      dict[label] = std::move(e);
    }
    out += "\nTo help you, here are dedicated DEFINITION and GUIDELINES for each entity tag.\n";
    out += detail::dump_pretty(dict);
  }
  return out;
}

std::size_t example_token_count(const InstructionExample& example, const TokenCounter& counter) {
  return count_tokens(example.instruction, counter) + count_tokens(example.input, counter) +
         count_tokens(example.output, counter);
}

namespace {

// Input and output of the window [begin, end); the instruction is left empty.
InstructionExample make_window(const AnnotatedSentence& sentence, std::size_t begin,
                               std::size_t end) {
  AnnotatedSentence window;
  window.tokens.assign(sentence.tokens.begin() + begin, sentence.tokens.begin() + end);
  for (const EntitySpan& span : sentence.spans) {
    if (span.start >= begin && span.end <= end)
      window.spans.push_back({span.start - begin, span.end - begin, span.label});
  }
  InstructionExample ex;
  ex.input = join(window.tokens, " ");
  ex.output = tagfmt::spans_to_slash(window);
  ex.meta.sentence_id = sentence.id;
  return ex;
}

}  // namespace

std::vector<InstructionExample> build_example(const AnnotatedSentence& sentence,
                                              const LabelSchema& schema, bool include_guidelines,
                                              const TokenBudget& budget) {
  return build_example(sentence, schema, build_instruction(schema, include_guidelines), budget);
}

std::vector<InstructionExample> build_example(const AnnotatedSentence& sentence,
                                              const LabelSchema& schema,
                                              const std::string& instruction,
                                              const TokenBudget& budget) {
  if (sentence.tokens.empty())
    throw std::invalid_argument("sentence '" + sentence.id + "' has no tokens");
  if (budget.max_tokens == 0) throw BudgetError("token budget must be positive");
  for (const EntitySpan& span : sentence.spans) {
    if (!schema.contains(span.label))
      throw SchemaError("label '" + span.label + "' of sentence '" + sentence.id +
                            "' is not in schema '" + schema.name() + "'",
                        span.label);
  }
  const std::size_t instruction_cost = count_tokens(instruction, budget.counter);
  auto fits = [&](const InstructionExample& ex) {
    return instruction_cost + count_tokens(ex.input, budget.counter) +
               count_tokens(ex.output, budget.counter) <=
           budget.max_tokens;
  };

  InstructionExample whole = make_window(sentence, 0, sentence.tokens.size());
  if (fits(whole)) {
    whole.instruction = instruction;
    return {std::move(whole)};
  }

  // Atomic units: each entity span, and each token outside any span.
  struct Unit {
    std::size_t begin, end;
  };
  std::vector<Unit> units;
  std::size_t next_span = 0;
  for (std::size_t i = 0; i < sentence.tokens.size();) {
    if (next_span < sentence.spans.size() && sentence.spans[next_span].start == i) {
      units.push_back({i, sentence.spans[next_span].end});
      i = sentence.spans[next_span++].end;
    } else {
      units.push_back({i, i + 1});
      ++i;
    }
  }

  std::vector<InstructionExample> chunks;
  std::size_t u = 0;
  while (u < units.size()) {
    const std::size_t begin = units[u].begin;
    std::size_t taken = 0;
    InstructionExample best;
    while (u + taken < units.size()) {
      InstructionExample candidate = make_window(sentence, begin, units[u + taken].end);
      if (!fits(candidate)) break;
      best = std::move(candidate);
      ++taken;
    }
    if (taken == 0) {
      const Unit& unit = units[u];
      throw BudgetError(std::string(unit.end - unit.begin > 1 ? "entity span" : "token") + " at " +
                        std::to_string(unit.begin) + " of sentence '" + sentence.id +
                        "' does not fit the " + std::to_string(budget.max_tokens) +
                        "-token budget on its own");
    }
    best.instruction = instruction;
    best.meta.chunk_index = chunks.size();
    chunks.push_back(std::move(best));
    u += taken;
  }
  for (auto& chunk : chunks) chunk.meta.chunk_count = chunks.size();
  return chunks;
}

std::string training_jsonl(std::span<const InstructionExample> examples) {
  std::string out;
  for (const InstructionExample& ex : examples) {
    ojson meta;
    meta["id"] = ex.meta.sentence_id;
    meta["chunk"] = ex.meta.chunk_index;
    meta["chunks"] = ex.meta.chunk_count;
    meta["origin"] = ex.meta.origin;
    ojson doc;
    doc["instruction"] = ex.instruction;
    doc["input"] = ex.input;
    doc["output"] = ex.output;
    doc["meta"] = std::move(meta);
    out += detail::dump_compact(doc);
    out += '\n';
  }
  return out;
}

void emit_training_jsonl(std::span<const InstructionExample> examples,
                         const std::filesystem::path& path) {
  write_file(path, training_jsonl(examples));
}

std::vector<InstructionExample> parse_training_jsonl(std::string_view text) {
  std::vector<InstructionExample> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("malformed training record", line_no);
    try {
      InstructionExample ex;
      ex.instruction = doc.at("instruction").get<std::string>();
      ex.input = doc.at("input").get<std::string>();
      ex.output = doc.at("output").get<std::string>();
      const auto& meta = doc.at("meta");
      ex.meta.sentence_id = meta.at("id").get<std::string>();
      ex.meta.chunk_index = meta.at("chunk").get<std::size_t>();
      ex.meta.chunk_count = meta.at("chunks").get<std::size_t>();
      ex.meta.origin = meta.at("origin").get<std::string>();
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("training record: ") + e.what(), line_no);
    }
  }
  return out;
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::Base: return "base";
    case Origin::Gold: return "gold";
    case Origin::Augmented: return "augmented";
    case Origin::Duplicate: return "duplicate";
  }
  return "unknown";
}

Dataset assemble_dataset(std::span<const AnnotatedSentence> base,
                         std::span<const AnnotatedSentence> gold,
                         std::span<const AnnotatedSentence> augmented,
                         std::size_t duplication_factor) {
  Dataset ds;
  ds.records.reserve(base.size() + gold.size() * (1 + duplication_factor) + augmented.size());
  for (const auto& s : base) ds.records.push_back({s, Origin::Base});
  for (const auto& s : gold) ds.records.push_back({s, Origin::Gold});
  for (const auto& s : augmented) ds.records.push_back({s, Origin::Augmented});
  for (std::size_t k = 1; k <= duplication_factor; ++k) {
    for (const auto& s : gold) {
      DatasetRecord copy{s, Origin::Duplicate};
      copy.sentence.id += "::dup" + std::to_string(k);
      ds.records.push_back(std::move(copy));
    }
  }
  ds.manifest.base = base.size();
  ds.manifest.gold = gold.size();
  ds.manifest.augmented = augmented.size();
  ds.manifest.duplicates = gold.size() * duplication_factor;
  ds.manifest.duplication_factor = duplication_factor;
  return ds;
}

std::string manifest_to_json(const DatasetManifest& m) {
  ojson doc;
  doc["base"] = m.base;
  doc["gold"] = m.gold;
  doc["augmented"] = m.augmented;
  doc["duplicates"] = m.duplicates;
  doc["duplication_factor"] = m.duplication_factor;
  doc["in_domain"] = m.in_domain();
  doc["total"] = m.total();
  doc["examples"] = m.examples;
  return detail::dump_pretty(doc) + "\n";
}

}  // namespace nerpipe::prompt
