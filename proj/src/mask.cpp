#include "nerpipe/mask.hpp"

#include <algorithm>
#include <map>

#include "json_util.hpp"
#include "nerpipe/error.hpp"

namespace nerpipe::mask {

namespace {

std::map<std::string, std::size_t> label_counts(const MaskedTemplate& tmpl) {
  std::map<std::string, std::size_t> counts;
  for (const MaskedEntity& e : tmpl.entities) ++counts[e.label];
  return counts;
}

std::string placeholder_text(const std::string& label, std::size_t k, bool suffixed) {
  std::string out = "<<" + label;
  if (suffixed) out += "#" + std::to_string(k);
  out += ">>";
  return out;
}

}  // namespace

MaskedTemplate mask_entities(const AnnotatedSentence& sentence) {
  if (sentence.spans.empty())
    throw MaskError("sentence '" + sentence.id + "' has no entities: nothing to mask");
  MaskedTemplate tmpl;
  tmpl.parent_id = sentence.id;
  tmpl.source = sentence.source;

  std::string pending;
  bool first = true;
  auto separate = [&] {
    if (!first) pending += ' ';
    first = false;
  };
  std::size_t next_span = 0;
  for (std::size_t i = 0; i < sentence.tokens.size();) {
    if (next_span < sentence.spans.size() && sentence.spans[next_span].start == i) {
      const EntitySpan& span = sentence.spans[next_span];
      separate();
      if (!pending.empty()) tmpl.parts.emplace_back(PlainText{std::move(pending)});
      pending.clear();
      const std::size_t ordinal = tmpl.entities.size();
      std::vector<std::string> surface(sentence.tokens.begin() + span.start,
                                       sentence.tokens.begin() + span.end);
      tmpl.parts.emplace_back(Placeholder{ordinal, span.label});
      tmpl.entities.push_back({ordinal, span.label, join(surface, " "), span});
      i = span.end;
      ++next_span;
    } else {
      separate();
      pending += sentence.tokens[i];
      ++i;
    }
  }
  if (!pending.empty()) tmpl.parts.emplace_back(PlainText{std::move(pending)});

  if (find_placeholders(render_template(tmpl)).size() != tmpl.entities.size())
    throw MaskError("sentence '" + sentence.id + "' already contains <<...>> placeholder syntax");
  return tmpl;
}

std::string render_template(const MaskedTemplate& tmpl) {
  const auto counts = label_counts(tmpl);
  std::map<std::string, std::size_t> seen;
  std::string out;
  for (const TemplatePart& part : tmpl.parts) {
    if (const auto* text = std::get_if<PlainText>(&part)) {
      out += text->text;
    } else {
      const auto& ph = std::get<Placeholder>(part);
      const auto it = counts.find(ph.label);
      const bool repeated = it != counts.end() && it->second > 1;
      out += placeholder_text(ph.label, ++seen[ph.label], repeated);
    }
  }
  return out;
}

std::string template_to_json(const MaskedTemplate& tmpl) {
  using detail::ojson;
  ojson parts = ojson::array();
  for (const TemplatePart& part : tmpl.parts) {
    ojson p;
    if (const auto* text = std::get_if<PlainText>(&part)) {
      p["text"] = text->text;
    } else {
      const auto& ph = std::get<Placeholder>(part);
      p["placeholder"] = ph.ordinal;
      p["label"] = ph.label;
    }
    parts.push_back(std::move(p));
  }
  ojson entities = ojson::array();
  for (const MaskedEntity& e : tmpl.entities) {
    ojson o;
    o["ordinal"] = e.ordinal;
    o["label"] = e.label;
    o["surface"] = e.surface;
    o["start"] = e.original_span.start;
    o["end"] = e.original_span.end;
    entities.push_back(std::move(o));
  }
  ojson doc;
  doc["parts"] = std::move(parts);
  doc["entities"] = std::move(entities);
  doc["parent_id"] = tmpl.parent_id;
  return detail::dump_compact(doc);
}

std::vector<PlaceholderMatch> find_placeholders(std::string_view text) {
  std::vector<PlaceholderMatch> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("<<", pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = text.find(">>", open + 2);
    if (close == std::string_view::npos) break;
    // Innermost opener before the closer, so "<< <<PER>>" matches <<PER>>.
    std::size_t inner_open = open;
    for (std::size_t k = close; k-- > open + 1;) {
      if (text[k] == '<' && text[k - 1] == '<') {
        inner_open = k - 1;
        break;
      }
    }
    std::string_view inner = trim(text.substr(inner_open + 2, close - inner_open - 2));
    pos = close + 2;
    if (inner.empty() || inner.find('\n') != std::string_view::npos) continue;

    PlaceholderMatch match{inner_open, close + 2, std::string(inner), std::nullopt};
    const std::size_t hash = inner.rfind('#');
    if (hash != std::string_view::npos && hash + 1 < inner.size() && hash > 0) {
      std::string_view digits = inner.substr(hash + 1);
      if (digits.size() <= 9 &&
          std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        match.label = std::string(trim(inner.substr(0, hash)));
        match.label_ordinal = std::stoul(std::string(digits));
      }
    }
    out.push_back(std::move(match));
  }
  return out;
}

std::string strip_placeholders(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  for (const PlaceholderMatch& m : find_placeholders(text)) {
    out.append(text.substr(pos, m.begin - pos));
    out += ' ';
    pos = m.end;
  }
  out.append(text.substr(pos));
  return out;
}

AnnotatedSentence reinject_entities(std::string_view variant_text, const MaskedTemplate& tmpl,
                                    std::size_t variant_number) {
  const auto matches = find_placeholders(variant_text);
  if (matches.size() != tmpl.entities.size())
    throw MismatchError(matches.size(), tmpl.entities.size());

  std::map<std::string, std::vector<std::size_t>> by_label;  // label -> entity indices
  for (std::size_t i = 0; i < tmpl.entities.size(); ++i)
    by_label[tmpl.entities[i].label].push_back(i);
  for (const PlaceholderMatch& m : matches) {
    if (!by_label.contains(m.label)) throw UnknownLabelError(m.label);
  }

  std::vector<std::size_t> assigned(matches.size());
  std::vector<bool> claimed(tmpl.entities.size(), false);
  std::vector<bool> resolved(matches.size(), false);
  for (std::size_t k = 0; k < matches.size(); ++k) {
    const PlaceholderMatch& m = matches[k];
    if (!m.label_ordinal) continue;
    const auto& candidates = by_label.at(m.label);
    const std::size_t ord = *m.label_ordinal;
    const std::string name = m.label + "#" + std::to_string(ord);
    if (ord < 1 || ord > candidates.size()) throw UnknownLabelError(name);
    const std::size_t entity = candidates[ord - 1];
    if (claimed[entity]) throw UnknownLabelError(name);
    claimed[entity] = true;
    assigned[k] = entity;
    resolved[k] = true;
  }
  // Positional mapping for placeholders without a #k suffix.
  for (std::size_t k = 0; k < matches.size(); ++k) {
    if (resolved[k]) continue;
    const auto& candidates = by_label.at(matches[k].label);
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&claimed](std::size_t e) { return !claimed[e]; });
    if (it == candidates.end()) {
      const auto found = std::count_if(matches.begin(), matches.end(), [&](const auto& other) {
        return other.label == matches[k].label;
      });
      throw MismatchError(static_cast<std::size_t>(found), candidates.size(), matches[k].label);
    }
    claimed[*it] = true;
    assigned[k] = *it;
  }

  AnnotatedSentence out;
  out.id = tmpl.parent_id + "::v" + std::to_string(variant_number);
  out.source = tmpl.source;
  std::size_t pos = 0;
  auto append_text = [&out](std::string_view piece) {
    for (std::string& tok : split_whitespace(piece)) out.tokens.push_back(std::move(tok));
  };
  for (std::size_t k = 0; k < matches.size(); ++k) {
    append_text(variant_text.substr(pos, matches[k].begin - pos));
    const MaskedEntity& entity = tmpl.entities[assigned[k]];
    const std::size_t start = out.tokens.size();
    append_text(entity.surface);
    out.spans.push_back({start, out.tokens.size(), entity.label});
    pos = matches[k].end;
  }
  append_text(variant_text.substr(pos));
  check_sentence(out);
  return out;
}

}  // namespace nerpipe::mask
