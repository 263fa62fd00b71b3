#pragma once

#include <json.hpp>

#include <random>
#include <string>
#include <vector>

#include "nerpipe/mask.hpp"
#include "nerpipe/types.hpp"

namespace nerpipe::testing {

// English science-flavoured sentences of at least ten words with one or two entities.
inline std::vector<AnnotatedSentence> science_gold(std::size_t n, std::uint64_t seed = 1) {
  static const std::vector<std::vector<std::string>> people{{"Marie", "Curie"}, {"Niels", "Bohr"},
                                                            {"Rosalind", "Franklin"}, {"Enrico", "Fermi"}};
  static const std::vector<std::vector<std::string>> places{{"Paris"}, {"Copenhagen"}, {"London"},
                                                            {"Chicago"}, {"Rome"}};
  static const std::vector<std::string> fillers{"carefully", "later", "again", "quietly", "first"};
  std::mt19937_64 rng(seed);
  std::vector<AnnotatedSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& who = people[rng() % people.size()];
    const auto& where = places[rng() % places.size()];
    AnnotatedSentence s;
    s.id = "gold#" + std::to_string(i);
    s.source = "science";
    s.tokens = who;
    for (const char* w : {"worked", "on", "the", "new", "theory", "in"}) s.tokens.push_back(w);
    s.tokens.push_back(where[0]);
    for (const char* w : {"with", "the", "team"}) s.tokens.push_back(w);
    s.tokens.push_back(fillers[rng() % fillers.size()]);
    s.tokens.push_back(".");
    s.spans = {{0, who.size(), "scientist"}, {who.size() + 6, who.size() + 7, "location"}};
    out.push_back(std::move(s));
  }
  return out;
}

// A close paraphrase of the rendered template that keeps every placeholder.
inline std::string good_variant(const std::string& rendered, int k) {
  return k == 0 ? rendered : rendered + " indeed";
}

// Drops the first placeholder, which the tag-count gate must catch.
inline std::string dropped_placeholder(const std::string& rendered) {
  const auto b = rendered.find("<<");
  const auto e = rendered.find(">>", b);
  return rendered.substr(0, b) + "someone" + rendered.substr(e + 2);
}

// Mock fixture: the first `failing` sentences get two bad variants on attempt 1
// and two good ones on attempt 2; the rest succeed on attempt 1.
inline std::string mock_fixture(const std::vector<AnnotatedSentence>& gold, std::size_t failing) {
  std::string out;
  auto line = [&](const std::string& id, int attempt, std::vector<std::string> v) {
    nlohmann::json j{{"match", id}, {"attempt", attempt}, {"body", {{"variants", v}}}};
    out += j.dump() + "\n";
  };
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::string r = mask::render_template(mask::mask_entities(gold[i]));
    const std::vector<std::string> good{good_variant(r, 0), good_variant(r, 1)};
    if (i < failing) {
      line(gold[i].id, 1, {dropped_placeholder(r), dropped_placeholder(r)});
      line(gold[i].id, 2, good);
    } else {
      line(gold[i].id, 1, good);
    }
  }
  return out;
}

}  // namespace nerpipe::testing
