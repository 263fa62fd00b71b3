#include "nerpipe/validate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

#include "nerpipe/error.hpp"

namespace nerpipe::validate {

namespace {

std::vector<std::string> content_terms(std::string_view text) {
  std::vector<std::string> terms;
  for (std::string tok : split_whitespace(mask::strip_placeholders(text))) {
    auto is_punct = [](unsigned char c) { return c < 0x80 && std::ispunct(c); };
    std::size_t b = 0, e = tok.size();
    while (b < e && is_punct(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && is_punct(static_cast<unsigned char>(tok[e - 1]))) --e;
    if (b == e) continue;
    tok = tok.substr(b, e - b);
    std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) {
      return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
    terms.push_back(std::move(tok));
  }
  return terms;
}

}  // namespace

std::vector<std::vector<double>> TermFrequencyEmbedder::embed(
    std::span<const std::string> texts) const {
  std::map<std::string, std::size_t> vocab;
  std::vector<std::vector<std::string>> terms;
  terms.reserve(texts.size());
  for (const std::string& text : texts) {
    terms.push_back(content_terms(text));
    for (const std::string& t : terms.back()) vocab.emplace(t, 0);
  }
  std::size_t next = 0;
  for (auto& [term, index] : vocab) index = next++;
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& list : terms) {
    std::vector<double> v(vocab.size(), 0.0);
    for (const std::string& t : list) v[vocab.at(t)] += 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

TagCountCheck check_tag_count(const mask::MaskedTemplate& tmpl, std::string_view variant_text) {
  const auto matches = mask::find_placeholders(variant_text);
  bool labels_known = std::all_of(matches.begin(), matches.end(), [&tmpl](const auto& m) {
    return std::any_of(tmpl.entities.begin(), tmpl.entities.end(),
                       [&m](const mask::MaskedEntity& e) { return e.label == m.label; });
  });
  return {labels_known && matches.size() == tmpl.entities.size(), matches.size()};
}

double semantic_similarity(std::string_view original, std::string_view variant,
                           const Embedder& embedder) {
  if (original.empty() || variant.empty())
    throw std::invalid_argument("semantic_similarity requires non-empty texts");
  const std::vector<std::string> batch{std::string(original), std::string(variant)};
  const auto vectors = embedder.embed(batch);
  if (vectors.size() != 2 || vectors[0].size() != vectors[1].size())
    throw Error("embedder returned mismatched vectors");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < vectors[0].size(); ++i) {
    dot += vectors[0][i] * vectors[1][i];
    na += vectors[0][i] * vectors[0][i];
    nb += vectors[1][i] * vectors[1][i];
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Accept: return "accept";
    case Verdict::Retry: return "retry";
    case Verdict::Fallback: return "fallback";
  }
  return "unknown";
}

ValidationOutcome validate_variant(const mask::MaskedTemplate& tmpl, std::string_view variant_text,
                                   const ValidationConfig& config, const Embedder& embedder) {
  ValidationOutcome outcome;
  outcome.tag_count_ok = check_tag_count(tmpl, variant_text).ok;
  if (!outcome.tag_count_ok || variant_text.empty()) {
    outcome.verdict = Verdict::Retry;
    return outcome;
  }
  outcome.similarity = semantic_similarity(mask::render_template(tmpl), variant_text, embedder);
  outcome.similarity_ok = outcome.similarity >= config.similarity_threshold;
  if (outcome.similarity_ok)
    outcome.verdict = Verdict::Accept;
  else
    outcome.verdict = config.positional_fallback ? Verdict::Fallback : Verdict::Retry;
  return outcome;
}

}  // namespace nerpipe::validate
