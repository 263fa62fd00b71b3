#pragma once

// Instruction-tuning records in the word/slash format, token-budget
// chunking, training JSONL and dataset composition.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerpipe/types.hpp"

namespace nerpipe::prompt {

using TokenCounter = std::function<std::size_t(std::string_view)>;

// ceil(utf8_bytes / 4)
std::size_t heuristic_token_count(std::string_view text);

std::size_t count_tokens(std::string_view text, const TokenCounter& counter = heuristic_token_count);

struct TokenBudget {
  std::size_t max_tokens = 2048;
  TokenCounter counter = heuristic_token_count;
};

struct ExampleMeta {
  std::string sentence_id;
  std::size_t chunk_index = 0;
  std::size_t chunk_count = 1;
  std::string origin;

  bool operator==(const ExampleMeta&) const = default;
};

struct InstructionExample {
  std::string instruction;
  std::string input;   // words joined by single spaces
  std::string output;  // word/slash target
  ExampleMeta meta;

  bool operator==(const InstructionExample&) const = default;
};

// Task description, the two guidelines, the tag list in schema order plus O
// and, when include_guidelines is set, the per-label DEFINITION/GUIDELINES
// dictionary. Throws SchemaError for an empty schema.
std::string build_instruction(const LabelSchema& schema, bool include_guidelines);

// counter(instruction) + counter(input) + counter(output)
std::size_t example_token_count(const InstructionExample& example, const TokenCounter& counter);

// One example when the sentence fits the budget; otherwise contiguous,
// non-overlapping token windows that never cut through an entity span.
// Every chunk repeats the full instruction. Throws SchemaError for a label
// outside the schema and BudgetError when a single token or entity cannot
// fit on its own.
std::vector<InstructionExample> build_example(const AnnotatedSentence& sentence,
                                              const LabelSchema& schema, bool include_guidelines,
                                              const TokenBudget& budget);

// Same as above with a prebuilt instruction string.
std::vector<InstructionExample> build_example(const AnnotatedSentence& sentence,
                                              const LabelSchema& schema,
                                              const std::string& instruction,
                                              const TokenBudget& budget);

// {"instruction","input","output","meta":{"id","chunk","chunks","origin"}}
std::string training_jsonl(std::span<const InstructionExample> examples);
void emit_training_jsonl(std::span<const InstructionExample> examples,
                         const std::filesystem::path& path);
std::vector<InstructionExample> parse_training_jsonl(std::string_view text);

enum class Origin { Base, Gold, Augmented, Duplicate };
std::string_view to_string(Origin origin);

struct DatasetRecord {
  AnnotatedSentence sentence;
  Origin origin = Origin::Base;
};

struct DatasetManifest {
  std::size_t base = 0;
  std::size_t gold = 0;
  std::size_t augmented = 0;
  std::size_t duplicates = 0;
  std::size_t duplication_factor = 0;
  std::size_t examples = 0;  // training records after chunking, filled by the caller

  std::size_t in_domain() const { return gold + augmented + duplicates; }
  std::size_t total() const { return base + in_domain(); }
};

struct Dataset {
  std::vector<DatasetRecord> records;
  DatasetManifest manifest;
};

// base, gold, augmented, then duplication_factor copies of gold with ids
// suffixed "::dup<k>" (k from 1).
Dataset assemble_dataset(std::span<const AnnotatedSentence> base,
                         std::span<const AnnotatedSentence> gold,
                         std::span<const AnnotatedSentence> augmented,
                         std::size_t duplication_factor);

std::string manifest_to_json(const DatasetManifest& manifest);

}  // namespace nerpipe::prompt
