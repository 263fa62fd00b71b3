#include "nerpipe/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "json_util.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/tagfmt.hpp"

namespace nerpipe::eval {

using detail::ojson;

Scores make_scores(const Counts& c) {
  Scores s{c, 0.0, 0.0, 0.0};
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

LabelCounts score_sentence(const AnnotatedSentence& gold, std::span<const EntitySpan> predicted) {
  std::vector<EntitySpan> pred;
  pred.reserve(predicted.size());
  for (const EntitySpan& p : predicted) pred.push_back({p.start, p.end, std::string(trim(p.label))});
  std::sort(pred.begin(), pred.end());
  pred.erase(std::unique(pred.begin(), pred.end()), pred.end());

  std::vector<EntitySpan> ref = gold.spans;
  for (auto& r : ref) r.label = std::string(trim(r.label));
  std::sort(ref.begin(), ref.end());
  ref.erase(std::unique(ref.begin(), ref.end()), ref.end());

  LabelCounts counts;
  for (const auto& r : ref) counts[r.label];
  for (const auto& p : pred) counts[p.label];
  // Merge over the two sorted lists.
  std::size_t i = 0, j = 0;
  while (i < ref.size() || j < pred.size()) {
    if (j == pred.size() || (i < ref.size() && ref[i] < pred[j])) {
      ++counts[ref[i++].label].fn;
    } else if (i == ref.size() || pred[j] < ref[i]) {
      ++counts[pred[j++].label].fp;
    } else {
      ++counts[ref[i].label].tp;
      ++i;
      ++j;
    }
  }
  return counts;
}

std::vector<EntitySpan> predicted_spans(std::span<const std::string> gold_tokens,
                                        std::string_view generation, OutputFormat format,
                                        std::size_t& irregular) {
  tagfmt::SlashParse parsed = tagfmt::slash_to_tags(generation);
  irregular += parsed.irregular;
  if (format == OutputFormat::Flat) {
    const auto tags = tagfmt::align_predictions(gold_tokens, parsed.items, tagfmt::TagScheme::Flat);
    return tagfmt::flat_tags_to_spans(gold_tokens, tags);
  }
  for (tagfmt::WordTag& item : parsed.items) {
    const std::string& t = item.tag;
    const bool valid = t == "O" || (t.size() > 2 && (t[0] == 'B' || t[0] == 'I') && t[1] == '-' &&
                                    t.substr(2) != "O");
    if (!valid) {
      ++irregular;
      item.tag = "O";
    }
  }
  const auto tags = tagfmt::align_predictions(gold_tokens, parsed.items, tagfmt::TagScheme::Bio);
  return tagfmt::bio_to_spans(gold_tokens, tags);
}

EvalReport evaluate_generations(std::span<const AnnotatedSentence> gold,
                                const std::map<std::string, std::string>& generations,
                                OutputFormat format) {
  std::unordered_map<std::string, const AnnotatedSentence*> by_id;
  for (const auto& s : gold) by_id.emplace(s.id, &s);
  for (const auto& [id, text] : generations) {
    if (!by_id.contains(id)) throw EvalError("generation id '" + id + "' is not in the gold set");
  }

  EvalReport report;
  LabelCounts totals;
  for (const AnnotatedSentence& s : gold) {
    std::vector<EntitySpan> predicted;
    const auto it = generations.find(s.id);
    if (it != generations.end())
      predicted = predicted_spans(s.tokens, it->second, format, report.irregular_outputs);
    for (const auto& [label, c] : score_sentence(s, predicted)) totals[label] += c;
    ++report.n_sentences;
  }
  Counts micro;
  for (const auto& [label, c] : totals) {
    report.per_label[label] = make_scores(c);
    micro += c;
  }
  report.micro = make_scores(micro);
  return report;
}

namespace {

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x * 100.0);
  return buf;
}

std::string row(const std::string& name, std::size_t width, const Scores& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %6zu %6zu %6zu %9s %7s %6s\n", static_cast<int>(width),
                name.c_str(), s.counts.tp, s.counts.fp, s.counts.fn, pct(s.precision).c_str(),
                pct(s.recall).c_str(), pct(s.f1).c_str());
  return buf;
}

ojson scores_json(const Scores& s) {
  ojson o;
  o["tp"] = s.counts.tp;
  o["fp"] = s.counts.fp;
  o["fn"] = s.counts.fn;
  o["precision"] = s.precision;
  o["recall"] = s.recall;
  o["f1"] = s.f1;
  return o;
}

Scores scores_from_json(const nlohmann::json& o) {
  Counts c{o.at("tp").get<std::size_t>(), o.at("fp").get<std::size_t>(),
           o.at("fn").get<std::size_t>()};
  return make_scores(c);
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ojson per_label = ojson::object();
    for (const auto& [label, s] : report.per_label) per_label[label] = scores_json(s);
    ojson doc;
    doc["per_label"] = std::move(per_label);
    doc["micro"] = scores_json(report.micro);
    doc["n_sentences"] = report.n_sentences;
    doc["irregular_outputs"] = report.irregular_outputs;
    return detail::dump_pretty(doc) + "\n";
  }
  std::size_t width = 5;
  for (const auto& [label, s] : report.per_label) width = std::max(width, label.size());
  char header[256];
  std::snprintf(header, sizeof header, "%-*s %6s %6s %6s %9s %7s %6s\n", static_cast<int>(width),
                "label", "tp", "fp", "fn", "precision", "recall", "f1");
  std::string out = header;
  for (const auto& [label, s] : report.per_label) out += row(label, width, s);
  out += row("micro", width, report.micro);
  out += "sentences: " + std::to_string(report.n_sentences) +
         "  irregular outputs: " + std::to_string(report.irregular_outputs) + "\n";
  return out;
}

EvalReport report_from_json(std::string_view json_text) {
  auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError("malformed report JSON", 1);
  try {
    EvalReport r;
    for (const auto& [label, s] : doc.at("per_label").items()) r.per_label[label] = scores_from_json(s);
    r.micro = scores_from_json(doc.at("micro"));
    r.n_sentences = doc.at("n_sentences").get<std::size_t>();
    r.irregular_outputs = doc.at("irregular_outputs").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what(), 1);
  }
}

std::map<std::string, std::string> parse_generations_jsonl(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("id") || !doc["id"].is_string() ||
        !doc.contains("output") || !doc["output"].is_string())
      throw ParseError("generation records need string 'id' and 'output'", line_no);
    const std::string id = doc["id"].get<std::string>();
    if (!out.emplace(id, doc["output"].get<std::string>()).second)
      throw ParseError("duplicate generation id '" + id + "'", line_no);
  }
  return out;
}

std::string render_generations(std::span<const AnnotatedSentence> gold, OutputFormat format) {
  std::string out;
  for (const AnnotatedSentence& s : gold) {
    ojson doc;
    doc["id"] = s.id;
    doc["output"] = format == OutputFormat::Flat
                        ? tagfmt::spans_to_slash(s)
                        : tagfmt::render_slash(s.tokens, tagfmt::spans_to_bio(s).tags);
    out += detail::dump_compact(doc);
    out += '\n';
  }
  return out;
}

}  // namespace nerpipe::eval
