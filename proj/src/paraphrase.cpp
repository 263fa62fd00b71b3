#include "nerpipe/paraphrase.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "json_util.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/mask.hpp"

namespace nerpipe::paraphrase {

using detail::ojson;

void ParaphraseConfig::check() const {
  if (n_variants < 1) throw ConfigError("n_variants must be at least 1");
  if (temperature_schedule.size() < max_retries + 1)
    throw ConfigError("temperature_schedule needs at least max_retries + 1 = " +
                      std::to_string(max_retries + 1) + " entries");
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0))
    throw ConfigError("similarity_threshold must lie in [0, 1]");
  if (max_parallel_requests < 1) throw ConfigError("max_parallel_requests must be at least 1");
  if (request_timeout.count() <= 0) throw ConfigError("request_timeout must be positive");
}

std::string build_paraphrase_prompt(std::string_view template_text, std::size_t n_variants) {
  std::string out;
  out +=
      "Task Description:\n"
      "You are a helpful assistant. I have a sentence with certain entities that I want to "
      "preserve in spirit, but you may modify the sentence slightly to add variety. Your task "
      "is:\n"
      "1. Read the Original Sentence provided.\n"
      "2. Create ";
  out += std::to_string(n_variants);
  out +=
      " new sentences (variants) that:\n"
      "   - DO NOT MODIFY any word enclosed in <<>> tags or move them around (do not introduce "
      "any new <<>> tags that weren't in the original).\n"
      "   - May adjust phrasing, structure, or add contextual details while maintaining logical "
      "coherence and meaning.\n"
      "   - Minor modifications are allowed, but retain the core entity references and do not "
      "transform them into something else.\n"
      "3. Return the output in a valid JSON format with the generated variants.\n"
      "Original Sentence: ";
  out += template_text;
  return out;
}

const std::string& response_schema_message() {
  static const std::string message =
      "Respond with a single JSON object of the form {\"variants\": [\"...\", \"...\"]} "
      "containing exactly the requested number of variant strings.";
  return message;
}

std::vector<std::string> parse_variants(std::string_view response_text, std::size_t expected) {
  std::string_view text = trim(response_text);
  const std::size_t fence = text.find("```");
  if (fence != std::string_view::npos) {
    std::size_t body = text.find('\n', fence);
    body = body == std::string_view::npos ? fence + 3 : body + 1;
    const std::size_t close = text.find("```", body);
    text = trim(text.substr(body, close == std::string_view::npos ? std::string_view::npos
                                                                   : close - body));
  }
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ResponseParseError("response is not valid JSON");
  const nlohmann::json* list = nullptr;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object()) {
    const auto it = doc.find("variants");
    if (it == doc.end() || !it->is_array())
      throw ResponseParseError("response object has no 'variants' array");
    list = &*it;
  } else {
    throw ResponseParseError("response is neither an object nor an array");
  }
  std::vector<std::string> out;
  for (const auto& item : *list) {
    if (!item.is_string()) throw ResponseParseError("variant is not a string");
    out.push_back(item.get<std::string>());
  }
  if (out.size() != expected) throw CountError(out.size(), expected);
  return out;
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Success: return "success";
    case Outcome::PartialSuccess: return "partial";
    case Outcome::Failed: return "failed";
    case Outcome::Skipped: return "skipped";
  }
  return "unknown";
}

AugmentationRecord augment_sentence(const AnnotatedSentence& sentence,
                                    const ParaphraseConfig& config, llm::LlmClient& client,
                                    const validate::Embedder& embedder) {
  config.check();
  const mask::MaskedTemplate tmpl = mask::mask_entities(sentence);
  const std::string rendered = mask::render_template(tmpl);
  const validate::ValidationConfig gate{config.similarity_threshold, config.positional_fallback};

  AugmentationRecord record;
  record.parent_id = sentence.id;
  bool any_response = false;
  const std::size_t n = config.n_variants;

  for (std::size_t attempt = 1; attempt <= config.max_retries + 1; ++attempt) {
    if (record.variants.size() >= n) break;
    const std::size_t need = config.full_regeneration ? n : n - record.variants.size();
    record.attempts = attempt;

    llm::LlmRequest request;
    request.model = config.model;
    request.system = response_schema_message();
    request.user = build_paraphrase_prompt(rendered, need);
    request.temperature = config.temperature_schedule[attempt - 1];
    request.max_tokens = config.max_tokens;
    request.parent_id = sentence.id;
    request.attempt = static_cast<int>(attempt);

    std::vector<std::string> candidates;
    try {
      const llm::LlmResponse response = client.complete(request);
      any_response = true;
      candidates = parse_variants(response.text, need);
    } catch (const ResponseParseError& e) {
      record.scores.push_back({attempt, "", 0.0, validate::Verdict::Retry, false, e.what()});
    } catch (const CountError& e) {
      record.scores.push_back({attempt, "", 0.0, validate::Verdict::Retry, false, e.what()});
    } catch (const std::exception&) {
      // Transport failure: nothing to score, try the next attempt.
    }

    for (const std::string& text : candidates) {
      if (record.variants.size() >= n) break;
      VariantScore score{attempt, text, 0.0, validate::Verdict::Retry, false, ""};
      try {
        AnnotatedSentence variant = mask::reinject_entities(text, tmpl, record.variants.size() + 1);
        const auto outcome = validate::validate_variant(tmpl, text, gate, embedder);
        score.similarity = outcome.similarity;
        score.verdict = outcome.verdict;
        if (outcome.verdict != validate::Verdict::Retry) {
          score.kept = true;
          record.variants.push_back(std::move(variant));
        }
      } catch (const std::exception& e) {
        score.error = e.what();
      }
      record.scores.push_back(std::move(score));
    }
    if (attempt == 1) record.first_attempt_ok = record.variants.size() >= n;
  }

  if (record.variants.size() >= n) {
    record.outcome = Outcome::Success;
  } else if (!record.variants.empty()) {
    record.outcome = Outcome::PartialSuccess;
  } else {
    record.outcome = Outcome::Failed;
    record.failure_reason = any_response ? "validation" : "transport";
  }
  return record;
}

double AugmentationSummary::failure_rate() const {
  return augmentable ? static_cast<double>(failed) / static_cast<double>(augmentable) : 0.0;
}

double AugmentationSummary::first_attempt_failure_rate() const {
  return augmentable ? static_cast<double>(first_attempt_failures) / static_cast<double>(augmentable)
                     : 0.0;
}

CorpusAugmentation augment_corpus(std::span<const AnnotatedSentence> sentences,
                                  const ParaphraseConfig& config, llm::LlmClient& client,
                                  const validate::Embedder& embedder) {
  config.check();
  CorpusAugmentation result;
  result.records.resize(sentences.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sentences.size(); i = next++) {
      const AnnotatedSentence& s = sentences[i];
      AugmentationRecord& record = result.records[i];
      if (s.spans.empty()) {
        record.parent_id = s.id;
        record.outcome = Outcome::Skipped;
        continue;
      }
      try {
        record = augment_sentence(s, config, client, embedder);
      } catch (const std::exception& e) {
        record = AugmentationRecord{};
        record.parent_id = s.id;
        record.outcome = Outcome::Failed;
        record.failure_reason = std::string("error: ") + e.what();
      }
    }
  };
  const std::size_t workers = std::min(config.max_parallel_requests, sentences.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    if (workers > 0) worker();
  }

  AugmentationSummary& sum = result.summary;
  sum.inputs = sentences.size();
  for (const AugmentationRecord& r : result.records) {
    if (r.outcome == Outcome::Skipped) {
      ++sum.skipped;
      continue;
    }
    ++sum.augmentable;
    sum.variants_kept += r.variants.size();
    if (r.outcome == Outcome::Success) ++sum.succeeded;
    if (r.outcome == Outcome::PartialSuccess) ++sum.partial;
    if (r.outcome == Outcome::Failed) ++sum.failed;
    if (!r.first_attempt_ok) ++sum.first_attempt_failures;
    if (r.attempts > 1) sum.regenerations += r.attempts - 1;
    sum.variants_rejected += static_cast<std::size_t>(std::count_if(
        r.scores.begin(), r.scores.end(), [](const VariantScore& s) { return !s.kept; }));
  }
  return result;
}

std::string record_to_json(const AugmentationRecord& record) {
  ojson variants = ojson::array();
  for (const auto& v : record.variants) variants.push_back(v.id);
  ojson scores = ojson::array();
  for (const VariantScore& s : record.scores) {
    ojson o;
    o["attempt"] = s.attempt;
    o["text"] = s.text;
    o["similarity"] = s.similarity;
    o["verdict"] = to_string(s.verdict);
    o["kept"] = s.kept;
    o["error"] = s.error;
    scores.push_back(std::move(o));
  }
  ojson doc;
  doc["parent_id"] = record.parent_id;
  doc["outcome"] = to_string(record.outcome);
  doc["failure_reason"] = record.failure_reason;
  doc["attempts"] = record.attempts;
  doc["first_attempt_ok"] = record.first_attempt_ok;
  doc["variants"] = std::move(variants);
  doc["scores"] = std::move(scores);
  return detail::dump_compact(doc);
}

std::string summary_to_json(const AugmentationSummary& s) {
  ojson doc;
  doc["inputs"] = s.inputs;
  doc["augmentable"] = s.augmentable;
  doc["skipped"] = s.skipped;
  doc["succeeded"] = s.succeeded;
  doc["partial"] = s.partial;
  doc["failed"] = s.failed;
  doc["variants_kept"] = s.variants_kept;
  doc["variants_rejected"] = s.variants_rejected;
  doc["first_attempt_failures"] = s.first_attempt_failures;
  doc["failure_first_attempt"] = s.first_attempt_failure_rate();
  doc["failure_rate"] = s.failure_rate();
  doc["regenerations"] = s.regenerations;
  return detail::dump_pretty(doc) + "\n";
}

}  // namespace nerpipe::paraphrase
