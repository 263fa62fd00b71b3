#include "nerpipe/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>

#include "json_util.hpp"
#include "nerpipe/corpus.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/eval.hpp"
#include "nerpipe/io.hpp"
#include "nerpipe/mask.hpp"
#include "nerpipe/prompt.hpp"

namespace nerpipe::cli {

namespace fs = std::filesystem;
using detail::ojson;

namespace {

// Raised for bad arguments, missing inputs and invalid configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

void require_keys(const nlohmann::json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end())
      throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read_into(const nlohmann::json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

fs::path require_input(const std::optional<fs::path>& path, const char* flag) {
  if (!path) throw UsageError(std::string("missing required input ") + flag);
  if (!fs::exists(*path)) throw UsageError("input file not found: " + path->string());
  return *path;
}

fs::path require_output(const std::optional<fs::path>& path) {
  if (!path) throw UsageError("missing --output directory");
  return *path;
}

std::vector<AnnotatedSentence> read_optional_corpus(const std::optional<fs::path>& path,
                                                    const char* flag) {
  if (!path) return {};
  return corpus::read_corpus(require_input(path, flag));
}

std::set<std::string> read_allowlist(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("allowlist file not found: " + path.string());
  if (path.extension() == ".json") {
    const auto labels = corpus::load_schema(path).labels();
    return {labels.begin(), labels.end()};
  }
  std::set<std::string> out;
  for (const std::string& label : split_whitespace(read_file(path))) out.insert(label);
  return out;
}

eval::OutputFormat parse_format(const std::string& name) {
  if (name == "flat") return eval::OutputFormat::Flat;
  if (name == "bio") return eval::OutputFormat::Bio;
  throw UsageError("--format must be 'flat' or 'bio', got '" + name + "'");
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  const auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  PipelineConfig cfg;
  try {
    require_keys(doc, "", {"seed", "paths", "filter", "paraphrase", "budget", "llm"});
    read_into(doc, "seed", cfg.seed);
    if (doc.contains("paths")) {
      const auto& p = doc["paths"];
      require_keys(p, "paths", {"corpus", "schema", "output"});
      if (p.contains("corpus")) cfg.corpus = p["corpus"].get<std::string>();
      if (p.contains("schema")) cfg.schema = p["schema"].get<std::string>();
      if (p.contains("output")) cfg.output = p["output"].get<std::string>();
    }
    if (doc.contains("filter")) {
      const auto& f = doc["filter"];
      require_keys(f, "filter", {"min_words", "english_only", "allowlist", "drop_without_entities"});
      read_into(f, "min_words", cfg.min_words);
      read_into(f, "english_only", cfg.english_only);
      read_into(f, "drop_without_entities", cfg.drop_without_entities);
      if (f.contains("allowlist")) cfg.allowlist = f["allowlist"].get<std::set<std::string>>();
    }
    if (doc.contains("paraphrase")) {
      const auto& p = doc["paraphrase"];
      require_keys(p, "paraphrase",
                   {"n_variants", "max_retries", "temperature_schedule", "similarity_threshold",
                    "request_timeout_ms", "max_parallel_requests", "model", "max_tokens",
                    "full_regeneration", "positional_fallback"});
      auto& pc = cfg.paraphrase;
      read_into(p, "n_variants", pc.n_variants);
      read_into(p, "max_retries", pc.max_retries);
      read_into(p, "temperature_schedule", pc.temperature_schedule);
      read_into(p, "similarity_threshold", pc.similarity_threshold);
      if (p.contains("request_timeout_ms"))
        pc.request_timeout = std::chrono::milliseconds(p["request_timeout_ms"].get<long>());
      read_into(p, "max_parallel_requests", pc.max_parallel_requests);
      read_into(p, "model", pc.model);
      read_into(p, "max_tokens", pc.max_tokens);
      read_into(p, "full_regeneration", pc.full_regeneration);
      read_into(p, "positional_fallback", pc.positional_fallback);
    }
    if (doc.contains("budget")) {
      const auto& b = doc["budget"];
      require_keys(b, "budget", {"max_tokens", "include_guidelines"});
      read_into(b, "max_tokens", cfg.max_tokens);
      read_into(b, "include_guidelines", cfg.include_guidelines);
    }
    if (doc.contains("llm")) {
      const auto& l = doc["llm"];
      require_keys(l, "llm", {"base_url", "embedding_model"});
      read_into(l, "base_url", cfg.base_url);
      read_into(l, "embedding_model", cfg.embedding_model);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  for (const auto* p : {&cfg.corpus, &cfg.schema}) {
    if (*p && !fs::exists(**p)) throw ConfigError("config references a missing file: " + (*p)->string());
  }
  cfg.paraphrase.check();
  return cfg;
}

namespace {

struct Flags {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> output;
  // filter
  std::optional<fs::path> input;
  std::optional<std::size_t> min_words;
  bool no_english = false;
  std::optional<fs::path> allowlist;
  bool drop_no_entities = false;
  std::optional<std::size_t> sample;
  // augment
  std::optional<fs::path> mock;
  std::optional<std::size_t> variants;
  std::optional<std::size_t> max_retries;
  std::optional<double> threshold;
  std::optional<std::size_t> parallel;
  bool full_regeneration = false;
  // build-dataset
  std::optional<fs::path> base, gold, augmented, schema;
  std::size_t dup = 0;
  bool no_guidelines = false;
  std::optional<std::size_t> max_tokens;
  // evaluate
  std::optional<fs::path> generations;
  std::string format = "flat";
  bool json = false;
};

int cmd_filter(const Flags& f, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path input = require_input(f.input ? f.input : cfg.corpus, "--input");
  const fs::path outdir = require_output(f.output ? f.output : cfg.output);
  corpus::FilterOptions opts;
  opts.min_words = f.min_words.value_or(cfg.min_words);
  if (opts.min_words < 1) throw UsageError("--min-words must be at least 1");
  opts.english_only = cfg.english_only && !f.no_english;
  opts.drop_without_entities = cfg.drop_without_entities || f.drop_no_entities;
  opts.label_allowlist = f.allowlist ? std::optional(read_allowlist(*f.allowlist)) : cfg.allowlist;

  const auto sentences = corpus::read_corpus(input);
  auto result = corpus::filter_corpus(sentences, opts);
  std::vector<AnnotatedSentence> kept = std::move(result.kept);
  const std::size_t kept_before_sampling = kept.size();
  const std::uint64_t seed = f.seed.value_or(cfg.seed);
  if (f.sample) {
    if (*f.sample > kept.size())
      throw UsageError("--sample " + std::to_string(*f.sample) + " exceeds the " +
                       std::to_string(kept.size()) + " kept sentences");
    kept = corpus::sample_corpus(kept, *f.sample, seed);
  }

  std::string rejected;
  std::map<std::string, std::size_t> reasons;
  for (const auto& r : result.rejected) {
    ojson line;
    line["id"] = r.sentence.id;
    line["reason"] = corpus::to_string(r.reason);
    rejected += detail::dump_compact(line) + "\n";
    ++reasons[std::string(corpus::to_string(r.reason))];
  }
  ojson report;
  report["input"] = sentences.size();
  report["kept"] = kept_before_sampling;
  report["rejected"] = result.rejected.size();
  report["reasons"] = reasons;
  report["sampled"] = f.sample ? ojson(kept.size()) : ojson(nullptr);
  report["seed"] = seed;

  write_file(outdir / "kept.jsonl", corpus::emit_jsonl(kept));
  write_file(outdir / "rejected.jsonl", rejected);
  write_file(outdir / "filter_report.json", detail::dump_pretty(report) + "\n");
  out << "filter: " << sentences.size() << " input, " << kept_before_sampling << " kept, "
      << result.rejected.size() << " rejected";
  if (f.sample) out << ", " << kept.size() << " sampled (seed " << seed << ")";
  out << "\n";
  return 0;
}

int cmd_augment(const Flags& f, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path input = require_input(f.input ? f.input : cfg.corpus, "--input");
  const fs::path outdir = require_output(f.output ? f.output : cfg.output);
  paraphrase::ParaphraseConfig pc = cfg.paraphrase;
  if (f.variants) pc.n_variants = *f.variants;
  if (f.max_retries) pc.max_retries = *f.max_retries;
  if (f.threshold) pc.similarity_threshold = *f.threshold;
  if (f.parallel) pc.max_parallel_requests = *f.parallel;
  if (f.full_regeneration) pc.full_regeneration = true;
  // Extend a default schedule so that --max-retries alone stays valid.
  while (pc.temperature_schedule.size() < pc.max_retries + 1 && !pc.temperature_schedule.empty())
    pc.temperature_schedule.push_back(pc.temperature_schedule.back());
  pc.check();

  const auto sentences = corpus::read_corpus(input);
  std::unique_ptr<llm::LlmClient> client;
  if (f.mock) {
    if (!fs::exists(*f.mock)) throw UsageError("mock fixture not found: " + f.mock->string());
    client = std::make_unique<llm::MockLlmClient>(llm::MockLlmClient::from_file(*f.mock));
  } else {
    const char* key = std::getenv(kApiKeyEnv);
    client = std::make_unique<llm::HttpLlmClient>(
        llm::HttpEndpoint{cfg.base_url, key ? key : "", pc.request_timeout});
  }
  std::unique_ptr<validate::Embedder> embedder;
  if (cfg.embedding_model.empty()) {
    embedder = std::make_unique<validate::TermFrequencyEmbedder>();
  } else {
    const char* key = std::getenv(kApiKeyEnv);
    embedder = std::make_unique<llm::RemoteEmbedder>(
        llm::HttpEndpoint{cfg.base_url, key ? key : "", pc.request_timeout}, cfg.embedding_model);
  }

  const auto result = paraphrase::augment_corpus(sentences, pc, *client, *embedder);
  std::string variants, records;
  for (const auto& r : result.records) {
    for (const auto& v : r.variants) variants += corpus::to_jsonl_line(v) + "\n";
    records += paraphrase::record_to_json(r) + "\n";
  }
  write_file(outdir / "variants.jsonl", variants);
  write_file(outdir / "augment_records.jsonl", records);
  write_file(outdir / "augment_summary.json", paraphrase::summary_to_json(result.summary));
  const auto& s = result.summary;
  out << "augment: " << s.inputs << " input, " << s.variants_kept << " variants kept, "
      << s.failed << " failed, " << s.regenerations << " regenerations, first-attempt failure rate "
      << s.first_attempt_failure_rate() << "\n";
  return 0;
}

int cmd_build_dataset(const Flags& f, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path schema_path = require_input(f.schema ? f.schema : cfg.schema, "--schema");
  const fs::path outdir = require_output(f.output ? f.output : cfg.output);
  if (!f.base && !f.gold && !f.augmented && !cfg.corpus)
    throw UsageError("give at least one of --base, --gold, --augmented");
  const LabelSchema schema = corpus::load_schema(schema_path);
  const auto base = read_optional_corpus(f.base ? f.base : cfg.corpus, "--base");
  const auto gold = read_optional_corpus(f.gold, "--gold");
  const auto augmented = read_optional_corpus(f.augmented, "--augmented");

  prompt::Dataset ds = prompt::assemble_dataset(base, gold, augmented, f.dup);
  prompt::TokenBudget budget;
  budget.max_tokens = f.max_tokens.value_or(cfg.max_tokens);
  const std::string instruction =
      prompt::build_instruction(schema, cfg.include_guidelines && !f.no_guidelines);
  std::vector<prompt::InstructionExample> examples;
  for (const auto& record : ds.records) {
    for (auto& ex : prompt::build_example(record.sentence, schema, instruction, budget)) {
      ex.meta.origin = prompt::to_string(record.origin);
      examples.push_back(std::move(ex));
    }
  }
  for (const auto& ex : examples) {
    if (prompt::example_token_count(ex, budget.counter) > budget.max_tokens)
      throw BudgetError("example for '" + ex.meta.sentence_id + "' exceeds the token budget");
  }
  ds.manifest.examples = examples.size();
  prompt::emit_training_jsonl(examples, outdir / "train.jsonl");
  write_file(outdir / "manifest.json", prompt::manifest_to_json(ds.manifest));
  const auto& m = ds.manifest;
  out << "build-dataset: " << m.total() << " records (base " << m.base << ", gold " << m.gold
      << ", augmented " << m.augmented << ", duplicates " << m.duplicates << "), "
      << examples.size() << " training examples\n";
  return 0;
}

int cmd_evaluate(const Flags& f, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path gold_path = require_input(f.gold ? f.gold : cfg.corpus, "--gold");
  const fs::path gen_path = require_input(f.generations, "--generations");
  const auto format = parse_format(f.format);
  const auto gold = corpus::read_corpus(gold_path);
  const auto generations = eval::parse_generations_jsonl(read_file(gen_path));
  const auto report = eval::evaluate_generations(gold, generations, format);
  const std::string text = eval::render_report(report, eval::ReportFormat::Text);
  if (auto outdir = f.output ? f.output : cfg.output) {
    write_file(*outdir / "report.json", eval::render_report(report, eval::ReportFormat::Json));
    write_file(*outdir / "report.txt", text);
  }
  out << text;
  return 0;
}

int cmd_report(const Flags& f, std::ostream& out) {
  const fs::path input = require_input(f.input, "--input");
  const auto report = eval::report_from_json(read_file(input));
  out << eval::render_report(report, f.json ? eval::ReportFormat::Json : eval::ReportFormat::Text);
  return 0;
}

int cmd_render_generations(const Flags& f, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path gold_path = require_input(f.gold ? f.gold : cfg.corpus, "--gold");
  const auto format = parse_format(f.format);
  const auto gold = corpus::read_corpus(gold_path);
  const std::string text = eval::render_generations(gold, format);
  if (f.output)
    write_file(*f.output, text);
  else
    out << text;
  return 0;
}

int cmd_mask(const Flags& f, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path input = require_input(f.input ? f.input : cfg.corpus, "--input");
  std::string text;
  for (const auto& s : corpus::read_corpus(input)) {
    if (s.spans.empty()) continue;
    text += mask::template_to_json(mask::mask_entities(s)) + "\n";
  }
  if (f.output)
    write_file(*f.output, text);
  else
    out << text;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"NER data pipeline: corpus filtering, paraphrase augmentation, instruction "
               "dataset building and entity-level evaluation"};
  app.name(args.empty() ? "nerpipe" : args.front());
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON pipeline config file");
  app.add_option("--seed", f.seed, "Random seed");

  auto* filter = app.add_subcommand("filter", "Filter and optionally sample an annotated corpus");
  filter->add_option("--input", f.input, "Corpus (.jsonl, or CoNLL for any other extension)");
  filter->add_option("--output", f.output, "Output directory");
  filter->add_option("--min-words", f.min_words, "Minimum token count (default 10)");
  filter->add_flag("--no-english-filter", f.no_english, "Disable the English-only rule");
  filter->add_option("--allowlist", f.allowlist, "Label allowlist: schema .json or one label per line");
  filter->add_flag("--drop-no-entities", f.drop_no_entities, "Drop sentences without spans");
  filter->add_option("--sample", f.sample, "Sample this many kept sentences");

  auto* augment = app.add_subcommand("augment", "Generate entity-preserving paraphrases");
  augment->add_option("--input", f.input, "Gold corpus");
  augment->add_option("--output", f.output, "Output directory");
  augment->add_option("--mock", f.mock, "Scripted response fixture instead of the HTTP endpoint");
  augment->add_option("--variants", f.variants, "Variants per sentence (default 2)");
  augment->add_option("--max-retries", f.max_retries, "Regeneration attempts (default 2)");
  augment->add_option("--threshold", f.threshold, "Similarity threshold (default 0.80)");
  augment->add_option("--parallel", f.parallel, "Maximum concurrent requests");
  augment->add_flag("--full-regeneration", f.full_regeneration, "Regenerate all variants on retry");

  auto* build = app.add_subcommand("build-dataset", "Build instruction-tuning JSONL");
  build->add_option("--base", f.base, "Base corpus");
  build->add_option("--gold", f.gold, "Gold in-domain corpus");
  build->add_option("--augmented", f.augmented, "Augmented variants");
  build->add_option("--schema", f.schema, "Label schema JSON");
  build->add_option("--dup", f.dup, "Extra copies of the gold set");
  build->add_flag("--no-guidelines", f.no_guidelines, "Omit definitions and guidelines");
  build->add_option("--max-tokens", f.max_tokens, "Token budget per example (default 2048)");
  build->add_option("--output", f.output, "Output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Score generations against gold");
  evaluate->add_option("--gold", f.gold, "Gold corpus");
  evaluate->add_option("--generations", f.generations, "JSONL of {id, output}");
  evaluate->add_option("--format", f.format, "flat or bio");
  evaluate->add_option("--output", f.output, "Directory for report.json and report.txt");

  auto* report = app.add_subcommand("report", "Render a saved JSON report");
  report->add_option("--input", f.input, "report.json");
  report->add_flag("--json", f.json, "Print JSON instead of the text table");

  auto* render = app.add_subcommand("render-generations", "Render gold as model-style outputs");
  render->add_option("--gold", f.gold, "Gold corpus");
  render->add_option("--format", f.format, "flat or bio");
  render->add_option("--output", f.output, "Output JSONL file (default stdout)");

  auto* masksub = app.add_subcommand("mask", "Write masked templates as JSON lines");
  masksub->add_option("--input", f.input, "Corpus");
  masksub->add_option("--output", f.output, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    PipelineConfig cfg = f.config ? load_config(*f.config) : PipelineConfig{};
    if (filter->parsed()) return cmd_filter(f, cfg, out);
    if (augment->parsed()) return cmd_augment(f, cfg, out);
    if (build->parsed()) return cmd_build_dataset(f, cfg, out);
    if (evaluate->parsed()) return cmd_evaluate(f, cfg, out);
    if (report->parsed()) return cmd_report(f, out);
    if (render->parsed()) return cmd_render_generations(f, cfg, out);
    if (masksub->parsed()) return cmd_mask(f, cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace nerpipe::cli
