#include <cstdio>
#include <fstream>
#include <random>

#include "discoq/dataset.hpp"
#include "discoq/errors.hpp"
#include "discoq/pregroup.hpp"
#include "discoq/rng.hpp"
#include "doctest.h"

using namespace discoq;

namespace {

PregroupType t(const char* text) { return PregroupType::parse(text); }

PregroupType random_type(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 5);
  std::uniform_int_distribution<int> base(0, 2);
  std::uniform_int_distribution<int> adj(-3, 3);
  std::vector<SimpleType> factors;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    factors.push_back({static_cast<BasicType>(base(rng)), adj(rng)});
  }
  return PregroupType(std::move(factors));
}

}  // namespace

TEST_SUITE("pregroup") {

TEST_CASE("type surface syntax round-trips") {
  CHECK(t("n").str() == "n");
  CHECK(t("n^l").str() == "n^l");
  CHECK(t("n^r.s.n^l").str() == "n^r.s.n^l");
  CHECK(t("s^0").str() == "s");
  CHECK(t("n^l^l").str() == "n^ll");
  CHECK(t("n^ll") == t("n^l^l"));
  CHECK(PregroupType{}.str() == "1");
  CHECK_THROWS_AS(t("x"), ValidationError);
  CHECK_THROWS_AS(t("n^q"), ValidationError);
  CHECK_THROWS_AS(t("n..s"), ValidationError);

  std::mt19937_64 rng = substream(11, "types");
  for (int i = 0; i < 200; ++i) {
    const PregroupType a = random_type(rng);
    CHECK(PregroupType::parse(a.empty() ? "" : a.str()) == a);
  }
}

TEST_CASE("adjoint reverses and shifts") {
  CHECK(adjoint(t("n"), AdjointDirection::Left) == t("n^l"));
  CHECK(adjoint(t("n^r.s.n^l"), AdjointDirection::Right) == t("n.s^r.n^rr"));
  CHECK(adjoint(PregroupType{}, AdjointDirection::Left) == PregroupType{});
}

TEST_CASE("adjoint round-trip on random types") {
  std::mt19937_64 rng = substream(12, "adjoint");
  for (int i = 0; i < 1000; ++i) {
    const PregroupType a = random_type(rng);
    CHECK(adjoint(adjoint(a, AdjointDirection::Left),
                  AdjointDirection::Right) == a);
    CHECK(adjoint(adjoint(a, AdjointDirection::Right),
                  AdjointDirection::Left) == a);
  }
}

TEST_CASE("concatenation is associative with unit") {
  std::mt19937_64 rng = substream(13, "concat");
  const PregroupType unit;
  for (int i = 0; i < 100; ++i) {
    const PregroupType a = random_type(rng), b = random_type(rng),
                       c = random_type(rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * unit == a);
    CHECK(unit * a == a);
  }
}

TEST_CASE("reduce handles the task sentence shape") {
  const std::vector<PregroupType> seq{t("n"), t("n^r.s.n^l"), t("n")};
  const auto d = reduce(seq);
  REQUIRE(d.has_value());
  CHECK(d->cups.size() == 2);
  CHECK(d->result == t("s"));
  CHECK(d->cups == std::vector<std::pair<int, int>>{{0, 1}, {3, 4}});
}

TEST_CASE("reduce handles the full-form sentence of the worked example") {
  const std::vector<PregroupType> seq{t("n.n^l"), t("n"),     t("n^r.s.p^l"),
                                      t("p.n^l"), t("n.n^l"), t("n")};
  const auto d = reduce(seq);
  REQUIRE(d.has_value());
  CHECK(d->cups.size() == 5);
  CHECK(d->result == t("s"));
}

TEST_CASE("reduce failure and identity cases") {
  const std::vector<PregroupType> two_nouns{t("n"), t("n")};
  CHECK_FALSE(reduce(two_nouns).has_value());

  const std::vector<PregroupType> lone_s{t("s")};
  const auto d = reduce(lone_s);
  REQUIRE(d.has_value());
  CHECK(d->cups.empty());

  const std::vector<PregroupType> empty_seq;
  CHECK_THROWS_AS(reduce(empty_seq), ValidationError);
}

TEST_CASE("reduce is deterministic") {
  const std::vector<PregroupType> seq{t("n.n^l"), t("n"), t("n^r.s.p^l"),
                                      t("p.n^l"), t("n.n^l"), t("n")};
  const auto a = reduce(seq);
  const auto b = reduce(seq);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->cups == b->cups);
  CHECK(a->result == b->result);
}

TEST_CASE("parse task captions") {
  const Lexicon lex = Lexicon::builtin();
  const Derivation d = parse("sphere isLeftOf cylinder", lex);
  CHECK(d.cups.size() == 2);
  CHECK(d.is_sentence());
  CHECK(d.input.size() == 3);

  const Derivation d2 = parse("cube isRightOf cone", lex);
  CHECK(d2.cups.size() == 2);
  CHECK(d2.is_sentence());
}

TEST_CASE("all 24 task captions reduce to s with exactly 2 cups") {
  const Lexicon lex = Lexicon::builtin();
  const auto& captions = enumerate_captions();
  CHECK(captions.size() == 24);
  for (const auto& triple : captions) {
    const Derivation d = parse(triple.caption(), lex);
    CHECK(d.is_sentence());
    CHECK(d.cups.size() == 2);
  }
}

TEST_CASE("the unsimplified full sentence reduces too") {
  const Lexicon lex = Lexicon::builtin();
  const Derivation d = parse("the sphere is to the left of the cube", lex);
  CHECK(d.is_sentence());
  CHECK(d.cups.size() == 8);
}

TEST_CASE("parse errors") {
  const Lexicon lex = Lexicon::builtin();
  CHECK_THROWS_WITH_AS(parse("sphere banana cube", lex),
                       "unknown word: banana", ParseError);
  try {
    parse("sphere cube", lex);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("n.n") != std::string::npos);
  }
}

TEST_CASE("derivation cups are planar") {
  const Lexicon lex = Lexicon::builtin();
  for (const char* caption :
       {"sphere isLeftOf cylinder", "the sphere is to the left of the cube",
        "the cube is on the sphere"}) {
    const Derivation d = parse(caption, lex);
    for (std::size_t i = 0; i < d.cups.size(); ++i) {
      for (std::size_t j = i + 1; j < d.cups.size(); ++j) {
        const auto [a1, b1] = d.cups[i];
        const auto [a2, b2] = d.cups[j];
        const bool crossing =
            (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1);
        CHECK_FALSE(crossing);
      }
    }
  }
}

TEST_CASE("lexicon JSON loading") {
  const std::string path = "lexicon_test.json";
  {
    std::ofstream out(path);
    out << R"({"alice": "n", "loves": "n^r.s.n^l"})";
  }
  const Lexicon lex = Lexicon::load(path);
  CHECK(lex.size() == 2);
  REQUIRE(lex.find("loves") != nullptr);
  CHECK(*lex.find("loves") == t("n^r.s.n^l"));
  const Derivation d = parse("alice loves alice", lex);
  CHECK(d.is_sentence());
  std::remove(path.c_str());

  CHECK_THROWS_AS(Lexicon::load("does_not_exist.json"), ValidationError);
}

}  // TEST_SUITE
