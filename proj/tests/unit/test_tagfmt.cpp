#include <doctest.h>

#include <random>

#include "nerpipe/error.hpp"
#include "nerpipe/tagfmt.hpp"
#include "support/generators.hpp"

using namespace nerpipe;
using namespace nerpipe::tagfmt;

namespace {

AnnotatedSentence sent(std::vector<std::string> tokens, std::vector<EntitySpan> spans) {
  return {"t", std::move(tokens), std::move(spans), "test"};
}

std::vector<std::string> words(const std::vector<WordTag>& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(i.word);
  return out;
}

std::vector<std::string> tags(const std::vector<WordTag>& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(i.tag);
  return out;
}

}  // namespace

TEST_CASE("check_sentence invariants") {
  CHECK_NOTHROW(check_sentence(sent({"a", "b"}, {{0, 2, "PER"}})));
  CHECK_THROWS_AS(check_sentence(sent({"a", ""}, {})), InvariantError);
  CHECK_THROWS_AS(check_sentence(sent({"a b"}, {})), InvariantError);
  CHECK_THROWS_AS(check_sentence(sent({"a"}, {{0, 2, "PER"}})), InvariantError);
  CHECK_THROWS_AS(check_sentence(sent({"a"}, {{0, 0, "PER"}})), InvariantError);
  CHECK_THROWS_AS(check_sentence(sent({"a"}, {{0, 1, "O"}})), InvariantError);
  CHECK_THROWS_AS(check_sentence(sent({"a", "b"}, {{0, 2, "A"}, {1, 2, "B"}})), InvariantError);
  CHECK_THROWS_AS(check_sentence(sent({"a", "b"}, {{1, 2, "A"}, {0, 1, "B"}})), InvariantError);
}

TEST_CASE("label schema rejects bad labels") {
  LabelSchema s("x");
  s.add("PER");
  CHECK_THROWS_AS(s.add("PER"), SchemaError);
  CHECK_THROWS_AS(s.add("O"), SchemaError);
  CHECK_THROWS_AS(s.add(""), SchemaError);
  s.add("LOC");
  CHECK(s.labels() == std::vector<std::string>{"PER", "LOC"});
}

TEST_CASE("spans_to_bio") {
  CHECK(spans_to_bio(sent({"a", "b", "c"}, {})).tags == std::vector<std::string>{"O", "O", "O"});
  CHECK(spans_to_bio(sent({"New", "York", "wins"}, {{0, 2, "PER"}})).tags ==
        std::vector<std::string>{"B-PER", "I-PER", "O"});
  CHECK(spans_to_bio(sent({"a", "b"}, {{0, 1, "PER"}, {1, 2, "PER"}})).tags ==
        std::vector<std::string>{"B-PER", "B-PER"});
}

TEST_CASE("bio_to_spans") {
  const std::vector<std::string> three{"a", "b", "c"};
  CHECK(bio_to_spans(three, {{"B-PER", "I-PER", "O"}, TagScheme::Bio}) ==
        std::vector<EntitySpan>{{0, 2, "PER"}});
  const std::vector<std::string> two{"a", "b"};
  CHECK(bio_to_spans(two, {{"I-LOC", "O"}, TagScheme::Bio}) == std::vector<EntitySpan>{{0, 1, "LOC"}});
  CHECK(bio_to_spans(two, {{"B-PER", "I-LOC"}, TagScheme::Bio}) ==
        std::vector<EntitySpan>{{0, 1, "PER"}, {1, 2, "LOC"}});
  CHECK_THROWS_AS(bio_to_spans(two, {{"X-PER", "O"}, TagScheme::Bio}), TagFormatError);
  CHECK_THROWS_AS(bio_to_spans(two, {{"B-", "O"}, TagScheme::Bio}), TagFormatError);
  CHECK_THROWS_AS(bio_to_spans(two, {{"O"}, TagScheme::Bio}), std::invalid_argument);
}

TEST_CASE("spans_to_slash") {
  CHECK(spans_to_slash(sent({"John", "visited", "the", "supermarket", "on", "Tuesday"},
                            {{0, 1, "PER"}, {3, 4, "LOC"}})) ==
        "John/PER, visited/O, the/O, supermarket/LOC, on/O, Tuesday/O");
  CHECK(spans_to_slash(sent({"a", "b"}, {})) == "a/O, b/O");
  CHECK(spans_to_slash(sent({"World", "Bank"}, {{0, 2, "ORG"}})) == "World/ORG, Bank/ORG");
}

TEST_CASE("slash_to_tags") {
  auto p = slash_to_tags("John/PER, visited/O");
  CHECK(p.items == std::vector<WordTag>{{"John", "PER"}, {"visited", "O"}});
  CHECK(p.irregular == 0);
  p = slash_to_tags("3/4/NUM");
  CHECK(p.items == std::vector<WordTag>{{"3/4", "NUM"}});
  p = slash_to_tags("garbled");
  CHECK(p.items == std::vector<WordTag>{{"garbled", "O"}});
  CHECK(p.irregular == 1);
  p = slash_to_tags("  a/X, b/O.  ");
  CHECK(p.items == std::vector<WordTag>{{"a", "X"}, {"b", "O"}});
  CHECK(slash_to_tags("").items.empty());
  p = slash_to_tags("/X, a/");
  CHECK(p.items == std::vector<WordTag>{{"a", "O"}});
  CHECK(p.irregular == 2);
}

TEST_CASE("align_predictions") {
  const std::vector<std::string> gold{"a", "b", "c", "d", "e"};
  SUBCASE("identical") {
    const std::vector<WordTag> pred{{"a", "X"}, {"b", "O"}, {"c", "Y"}, {"d", "O"}, {"e", "X"}};
    CHECK(align_predictions(gold, pred).tags == std::vector<std::string>{"X", "O", "Y", "O", "X"});
  }
  SUBCASE("missing word") {
    const std::vector<WordTag> pred{{"a", "X"}, {"b", "X"}, {"d", "Y"}, {"e", "O"}};
    CHECK(align_predictions(gold, pred).tags == std::vector<std::string>{"X", "X", "O", "Y", "O"});
  }
  SUBCASE("hallucinated extra word") {
    // LCS of [a b c d e] and [a b Z c d e] is the gold list; Z is discarded.
    const std::vector<WordTag> pred{{"a", "P"}, {"b", "O"}, {"Z", "Q"},
                                    {"c", "O"}, {"d", "L"}, {"e", "O"}};
    CHECK(align_predictions(gold, pred).tags == std::vector<std::string>{"P", "O", "O", "L", "O"});
  }
}

TEST_CASE("flat_tags_to_spans") {
  const std::vector<std::string> three{"a", "b", "c"};
  CHECK(flat_tags_to_spans(three, {{"PER", "PER", "O"}, TagScheme::Flat}) ==
        std::vector<EntitySpan>{{0, 2, "PER"}});
  const std::vector<std::string> two{"a", "b"};
  CHECK(flat_tags_to_spans(two, {{"PER", "LOC"}, TagScheme::Flat}) ==
        std::vector<EntitySpan>{{0, 1, "PER"}, {1, 2, "LOC"}});
  // Two adjacent one-token PER entities are indistinguishable from one span here.
  auto s = sent({"a", "b"}, {{0, 1, "PER"}, {1, 2, "PER"}});
  CHECK(flat_tags_to_spans(two, spans_to_flat(s)) == std::vector<EntitySpan>{{0, 2, "PER"}});
}

TEST_CASE("random round trips through BIO and slash") {
  std::mt19937_64 rng(11);
  testing::SentenceShape shape;
  shape.allow_adjacent_same = false;
  for (int k = 0; k < 300; ++k) {
    const auto s = testing::random_sentence(rng, "r", shape);
    CHECK(bio_to_spans(s.tokens, spans_to_bio(s)) == s.spans);
    const auto parsed = slash_to_tags(spans_to_slash(s));
    CHECK(parsed.irregular == 0);
    CHECK(words(parsed.items) == s.tokens);
    const auto t = tags(parsed.items);
    CHECK(flat_tags_to_spans(s.tokens, {t, TagScheme::Flat}) == s.spans);
  }
}
