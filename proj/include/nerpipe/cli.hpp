#pragma once

// Pipeline subcommands: filter, augment, build-dataset, evaluate, report,
// render-generations and mask. Exit codes: 0 success, 1 operational
// failure, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nerpipe/paraphrase.hpp"

namespace nerpipe::cli {

inline constexpr const char* kApiKeyEnv = "NERPIPE_API_KEY";

struct PipelineConfig {
  // paths
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> schema;
  std::optional<std::filesystem::path> output;
  // filter
  std::size_t min_words = 10;
  bool english_only = true;
  std::optional<std::set<std::string>> allowlist;
  bool drop_without_entities = false;
  // augmentation
  paraphrase::ParaphraseConfig paraphrase;
  // budget
  std::size_t max_tokens = 2048;
  bool include_guidelines = true;
  // llm endpoint; the API key is read from NERPIPE_API_KEY only
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string embedding_model;  // empty: offline term-frequency embedder
  std::uint64_t seed = 0;
};

// Reads a JSON config file. Unknown keys are rejected; paths it references
// must exist. Throws ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nerpipe::cli
