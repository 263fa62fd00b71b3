#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "nerpipe/corpus.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/io.hpp"
#include "support/generators.hpp"

using namespace nerpipe;
using namespace nerpipe::corpus;

namespace {

AnnotatedSentence words_sentence(const std::string& id, std::size_t n,
                                 std::vector<EntitySpan> spans = {}) {
  AnnotatedSentence s{id, {}, std::move(spans), "t"};
  static const std::vector<std::string> pool{"the", "scientist", "worked", "in", "a",
                                             "lab", "with", "his", "team", "on", "it"};
  for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(pool[i % pool.size()]);
  return s;
}

}  // namespace

TEST_CASE("parse_conll") {
  auto out = parse_conll("John B-PER\nvisited O\n\n", {"src"});
  REQUIRE(out.size() == 1);
  CHECK(out[0].tokens == std::vector<std::string>{"John", "visited"});
  CHECK(out[0].spans == std::vector<EntitySpan>{{0, 1, "PER"}});
  CHECK(parse_conll("").empty());

  out = parse_conll("-DOCSTART- O\n\na O\n\nb B-X\nc I-X\n\n\nd O\n", {"src"});
  REQUIRE(out.size() == 3);
  CHECK(out[0].id == "src#0");
  CHECK(out[2].id == "src#2");
  CHECK(out[1].spans == std::vector<EntitySpan>{{0, 2, "X"}});
}

TEST_CASE("parse_conll errors carry line numbers") {
  try {
    parse_conll("a O\nb Q-X\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_conll("a b O\n"), ParseError);
  ConllOptions any;
  any.columns = 0;
  CHECK(parse_conll("a NNP B-PER\n", any)[0].spans == std::vector<EntitySpan>{{0, 1, "PER"}});
}

TEST_CASE("parse_jsonl") {
  auto out = parse_jsonl(R"({"id":"a","tokens":["Hi"],"spans":[]})");
  REQUIRE(out.size() == 1);
  CHECK(out[0].spans.empty());
  try {
    parse_jsonl(R"({"id":"a","tokens":["Hi"],"spans":[{"start":0,"end":3,"label":"X"}]})");
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(e.id() == "a");
  }
  CHECK_THROWS_AS(parse_jsonl("{\"id\":\"a\",\"tokens\":[\"x\"],\"spans\":[]}\n{oops\n"), ParseError);
  CHECK_THROWS_AS(parse_jsonl("{\"id\":\"a\",\"tokens\":[\"x\"],\"spans\":[]}\n"
                              "{\"id\":\"a\",\"tokens\":[\"y\"],\"spans\":[]}\n"),
                  InvariantError);
}

TEST_CASE("jsonl round trip keeps order and bytes") {
  std::mt19937_64 rng(3);
  const auto corpus = testing::random_corpus(rng, 100);
  const std::string text = emit_jsonl(corpus);
  const auto back = parse_jsonl(text);
  CHECK(back == corpus);
  CHECK(emit_jsonl(back) == text);
  CHECK(to_jsonl_line(corpus[0]).rfind(R"({"id":"s0","tokens":)", 0) == 0);
}

TEST_CASE("read_corpus dispatches on extension") {
  const auto dir = std::filesystem::temp_directory_path() / "nerpipe_corpus_test";
  write_file(dir / "x.conll", "a B-PER\nb O\n");
  write_file(dir / "y.jsonl", R"({"id":"q","tokens":["z"],"spans":[]})" "\n");
  CHECK(read_corpus(dir / "x.conll")[0].id == "x#0");
  CHECK(read_corpus(dir / "y.jsonl")[0].id == "q");
  CHECK_THROWS_AS(read_corpus(dir / "missing.jsonl"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("schema parsing") {
  auto s = parse_schema(R"({"b":{"definition":"B","guidelines":"gb"},"a":{"DEFINITION":"A","GUIDELINES":"ga"}})",
                        "demo");
  CHECK(s.labels() == std::vector<std::string>{"b", "a"});
  CHECK(s.find("a")->definition == "A");
  CHECK(parse_schema(schema_to_json(s), "demo").entries() == s.entries());
  CHECK_THROWS_AS(parse_schema("[1]", "x"), SchemaError);
  CHECK_THROWS_AS(parse_schema(R"({"O":{"definition":"","guidelines":""}})", "x"), SchemaError);
}

TEST_CASE("filter rules") {
  FilterOptions opts;
  const auto nine = words_sentence("nine", 9);
  const auto ten = words_sentence("ten", 10);
  auto r = filter_corpus(std::vector{nine, ten}, opts);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].id == "ten");
  REQUIRE(r.rejected.size() == 1);
  CHECK(to_string(r.rejected[0].reason) == "min_words");

  opts.label_allowlist = std::set<std::string>{"PER"};
  const auto both = words_sentence("both", 10, {{0, 1, "PER"}, {2, 3, "GENE"}});
  r = filter_corpus(std::vector{both}, opts);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].spans == std::vector<EntitySpan>{{0, 1, "PER"}});
  const auto gene_only = words_sentence("gene", 10, {{2, 3, "GENE"}});
  r = filter_corpus(std::vector{gene_only}, opts);
  REQUIRE(r.rejected.size() == 1);
  CHECK(r.rejected[0].reason == RejectReason::LabelAllowlist);

  opts.label_allowlist.reset();
  opts.drop_without_entities = true;
  r = filter_corpus(std::vector{ten}, opts);
  CHECK(r.rejected.at(0).reason == RejectReason::NoEntities);

  opts.min_words = 0;
  CHECK_THROWS_AS(filter_corpus(std::vector{ten}, opts), std::invalid_argument);
}

TEST_CASE("english heuristic") {
  AnnotatedSentence en{"e", split_whitespace("The enzyme was isolated in 1953 by the team ."), {}, ""};
  AnnotatedSentence de{"d", split_whitespace("Das Enzym wurde von der Gruppe isoliert"), {}, ""};
  AnnotatedSentence zh{"z", split_whitespace("这 是 一个 句子 和 the"), {}, ""};
  CHECK(looks_english(en));
  CHECK_FALSE(looks_english(de));
  CHECK_FALSE(looks_english(zh));
  FilterOptions opts;
  opts.min_words = 1;
  auto r = filter_corpus(std::vector{en, de}, opts);
  CHECK(r.kept.size() == 1);
  CHECK(r.rejected.at(0).reason == RejectReason::NotEnglish);
  opts.english_only = false;
  CHECK(filter_corpus(std::vector{en, de}, opts).kept.size() == 2);
}

TEST_CASE("sample_corpus") {
  std::mt19937_64 rng(5);
  const auto corpus = testing::random_corpus(rng, 100);
  CHECK(sample_corpus(corpus, 100, 1) == corpus);
  CHECK(sample_corpus(corpus, 10, 7) == sample_corpus(corpus, 10, 7));
  const auto a = sample_corpus(corpus, 10, 1);
  const auto b = sample_corpus(corpus, 10, 2);
  CHECK(a != b);
  for (const auto* pick : {&a, &b}) {
    CHECK(pick->size() == 10);
    for (const auto& s : *pick) CHECK(std::find(corpus.begin(), corpus.end(), s) != corpus.end());
  }
  CHECK_THROWS_AS(sample_corpus(corpus, 101, 1), std::invalid_argument);
}
