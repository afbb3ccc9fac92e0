#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "zolab/error.hpp"
#include "zolab/eval.hpp"
#include "zolab/local.hpp"
#include "zolab/parallel.hpp"
#include "zolab/rng.hpp"

using namespace zolab;

namespace {

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(ZOLAB_DATA_DIR) + "/" + name);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BasicLocalSentence load(const std::string& name) { return parse_local_sentence(read_data(name)); }

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Brute force over ordered center tuples, distinct from the backtracking matcher.
bool brute_force_match(const Image& img, const FactoredPattern& fp) {
  const TorusGeometry g(img.n());
  const int cells = img.n() * img.n();
  std::vector<Pixel> chosen;
  auto rec = [&](auto&& self, std::size_t slot) -> bool {
    if (slot == fp.slots.size()) return true;
    for (int i = 0; i < cells; ++i) {
      const Pixel x = g.pixel(i);
      if (!fp.slots[slot].contains(img.ball_code(x, fp.r))) continue;
      bool far = true;
      for (const Pixel& y : chosen) far = far && g.distance(x, y) > 2 * fp.r;
      if (!far) continue;
      chosen.push_back(x);
      if (self(self, slot + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return rec(rec, 0);
}

Description random_description(std::mt19937_64& rng, int r) {
  const std::uint64_t mask = (std::uint64_t{1} << ball_cells(r)) - 1;
  return Description(r, rng() & mask);
}

void plant(Image& img, const Description& d, Pixel center) {
  const TorusGeometry g(img.n());
  int bit = 0;
  for (int dr = -d.radius(); dr <= d.radius(); ++dr)
    for (int dc = -d.radius(); dc <= d.radius(); ++dc, ++bit)
      img.set(g.wrap_add(center, {dr, dc}), d.cell(bit));
}

}  // namespace

TEST_CASE("description basics") {
  const Description d = Description::from_rows(std::vector<std::string>{"010", "111", "000"});
  CHECK(d.radius() == 1);
  CHECK(d.black_count() == 4);
  CHECK(d.white_count() == 5);
  CHECK(d.cell(1, 1));
  CHECK_FALSE(d.cell(0, 0));
  CHECK(d.complement().black_count() == 5);
  CHECK(center_black(1).black_count() == 1);
  CHECK(center_black(1).cell(1, 1));
  CHECK(all_white(2).white_count() == 25);
  CHECK(code_of([] { Description::from_rows(std::vector<std::string>{"01", "10"}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(description_probability(1, 8, 0.1) == doctest::Approx(0.1 * std::pow(0.9, 8)).epsilon(1e-12));
}

TEST_CASE("match_description examples") {
  const Image white(5);
  for (int i = 0; i < 25; ++i) CHECK(match_description(white, all_white(1), white.geometry().pixel(i)));
  CHECK_FALSE(match_description(white, center_black(1), {2, 2}));
  CHECK(code_of([] { match_description(Image(3), all_white(1), {0, 0}); }) == ErrorCode::ImageTooSmall);
  CHECK(code_of([] {
          FactoredPattern fp{1, {DescriptionSet(1)}};
          match_factored(Image(3), fp);
        }) == ErrorCode::ImageTooSmall);
}

TEST_CASE("match_factored examples") {
  CHECK(match_factored(Image(5), PatternSentence{1, {all_white(1)}}.factored()));
  Image one(8);
  one.set(Pixel{2, 5}, true);
  const FactoredPattern two_centers = PatternSentence{1, {center_black(1), center_black(1)}}.factored();
  CHECK_FALSE(match_factored(one, two_centers));
  CHECK(match_factored(one, PatternSentence{1, {center_black(1)}}.factored()));
  one.set(Pixel{6, 1}, true);
  CHECK(match_factored(one, two_centers));
  const auto w = find_witness(one, two_centers);
  REQUIRE(w);
  CHECK(w->size() == 2);
  CHECK(one.geometry().distance((*w)[0], (*w)[1]) > 2);
  CHECK(match_factored(Image(5), FactoredPattern{1, {DescriptionSet(1)}}) == false);
}

TEST_CASE("descriptions are exclusive and complete") {
  for (int i = 0; i < 40; ++i) {
    const Image img = sample({6, 0.4, derive_seed(31, i)});
    const Pixel x{i % 6, (i * 5) % 6};
    int matches = 0;
    std::uint64_t found = 0;
    for (std::uint64_t code = 0; code < 512; ++code) {
      if (match_description(img, Description(1, code), x)) {
        ++matches;
        found = code;
      }
    }
    CHECK(matches == 1);
    CHECK(found == img.ball_code(x, 1));
  }
}

TEST_CASE("descriptions_implying examples") {
  const DescriptionSet black = descriptions_implying(parse("C(x)"), 0);
  CHECK(black.size() == 1);
  CHECK(black.contains(Description(0, 1)));
  CHECK(black.min_black() == 1);
  CHECK(descriptions_implying(parse("C(x) & ~C(x)"), 0).empty());
  const DescriptionSet centered = descriptions_implying(parse("C(x)"), 1);
  CHECK(centered.size() == 256);
  for (const Description& d : centered.members()) REQUIRE(d.cell(1, 1));
  CHECK(descriptions_implying(parse("true"), 0).size() == 2);
  LocalOptions capped;
  capped.max_radius = 1;
  CHECK(code_of([&] { descriptions_implying(parse("C(x)"), 2, capped); }) == ErrorCode::RadiusTooLarge);
  CHECK(code_of([&] { descriptions_implying(parse("C(x)"), 4); }) == ErrorCode::RadiusTooLarge);
}

TEST_CASE("descriptions_implying ignores wrap inside the ball") {
  // On a plain 3x3 grid the right edge has no U-successor.
  const DescriptionSet s = descriptions_implying(parse("forall y. exists z. U(y,z)"), 1);
  CHECK(s.empty());
  const DescriptionSet t = descriptions_implying(parse("exists y. (U(x,y) & C(y))"), 1);
  CHECK(t.size() == 256);
  for (const Description& d : t.members()) REQUIRE(d.cell(1, 2));
}

TEST_CASE("descriptions_implying is independent of worker count") {
  const Formula psi = parse("exists y. exists z. (R(y,z) & C(y) & C(z) & ~C(x))");
  LocalOptions one, many;
  many.workers = 4;
  CHECK(descriptions_implying(psi, 1, one) == descriptions_implying(psi, 1, many));
}

TEST_CASE("factor examples") {
  const FactoredPattern fp = factor(load("black_pixel.json"));
  REQUIRE(fp.slots.size() == 1);
  CHECK(fp.slots[0].size() == 1);
  const FactoredPattern any = factor(BasicLocalSentence{0, {parse("true")}});
  CHECK(any.slots[0].size() == 2);
}

TEST_CASE("factor matches the sentence on every 4x4 image") {
  const BasicLocalSentence L{1, {parse("C(x) & exists y. (R(x,y) & C(y))")}};
  const FactoredPattern fp = factor(L);
  const CompiledFormula sentence(to_sentence(L));
  const TorusGeometry g(4);
  int agree = 0, positives = 0;
  for (std::uint64_t mask = 0; mask < (1U << 16); ++mask) {
    const Image img = Image::from_mask(4, mask);
    const bool via_eval = sentence.evaluate(img, {}, nullptr, {});
    const bool via_match = match_factored(img, fp);
    bool direct = false;
    for (int i = 0; i < 16 && !direct; ++i) {
      const Pixel x = g.pixel(i);
      direct = img.get(x) && img.get(g.wrap_add(x, {1, 0}));
    }
    agree += (via_eval == via_match) && (via_match == direct);
    positives += via_match;
  }
  CHECK(agree == 1 << 16);
  CHECK(positives > 0);
}

TEST_CASE("two-slot factoring agrees with the sentence on all 4x4 images") {
  const BasicLocalSentence L{1, {parse("C(x)"), parse("~C(x)")}};
  const FactoredPattern fp = factor(L);
  const CompiledFormula sentence(to_sentence(L));
  int agree = 0;
  for (std::uint64_t mask = 0; mask < (1U << 16); ++mask) {
    const Image img = Image::from_mask(4, mask);
    agree += sentence.evaluate(img, {}, nullptr, {}) == match_factored(img, fp);
  }
  CHECK(agree == 1 << 16);
}

TEST_CASE("match_factored agrees with the first-order sentence on random images") {
  const std::vector<std::string> files = {"black_pixel.json", "domino.json", "three_in_row.json",
                                          "white_ball.json", "unsat.json", "mixed_pair.json"};
  for (const std::string& file : files) {
    const BasicLocalSentence L = load(file);
    const FactoredPattern fp = factor(L);
    const CompiledFormula sentence(to_sentence(L));
    for (int i = 0; i < 500; ++i) {
      const Image img = sample({6, 0.4, derive_seed(77, i)});
      INFO(file << " image " << i);
      const bool m = match_factored(img, fp);
      REQUIRE(m == sentence.evaluate(img, {}, nullptr, {}));
      if (i < 100) REQUIRE(m == brute_force_match(img, fp));
    }
  }
}

TEST_CASE("two-slot matching on larger random images") {
  const BasicLocalSentence L = load("mixed_pair.json");
  const FactoredPattern fp = factor(L);
  const CompiledFormula sentence(to_sentence(L));
  int positives = 0;
  for (int i = 0; i < 60; ++i) {
    const int n = 6 + i % 3;
    const Image img = sample({n, 0.08, derive_seed(91, i)});
    const bool m = match_factored(img, fp);
    CHECK(m == sentence.evaluate(img, {}, nullptr, {}));
    CHECK(m == brute_force_match(img, fp));
    positives += m;
  }
  CHECK(positives > 0);
}

TEST_CASE("index battery") {
  CHECK(index(load("black_pixel.json")) == SentenceIndex::finite(1));
  CHECK(index(load("domino.json")) == SentenceIndex::finite(2));
  CHECK(index(load("three_in_row.json")) == SentenceIndex::finite(3));
  CHECK(index(load("white_ball.json")) == SentenceIndex::finite(0));
  CHECK(index(load("mixed_pair.json")) == SentenceIndex::finite(1));
  CHECK(index(load("unsat.json")).is_infinite());
  CHECK(index(load("unsat.json")).to_string() == "INFINITY");
  CHECK(index(PatternSentence{2, {center_black(2), center_black(2), center_black(2)}}.factored()) ==
        SentenceIndex::finite(1));
}

TEST_CASE("index of three isolated black centers at radius 2") {
  const Formula lone = parse("C(x) & forall y. (y = x | ~C(y))");
  LocalOptions opts;
  opts.workers = default_workers();
  const BasicLocalSentence L{2, {lone, lone, lone}};
  const FactoredPattern fp = factor(L, opts);
  for (const DescriptionSet& s : fp.slots) {
    CHECK(s.size() == 1);
    CHECK(s.contains(center_black(2)));
  }
  CHECK(index(fp) == SentenceIndex::finite(1));
}

TEST_CASE("index ignores the order of psis") {
  BasicLocalSentence L = load("mixed_pair.json");
  const SentenceIndex forward = index(L);
  std::reverse(L.psis.begin(), L.psis.end());
  CHECK(index(L) == forward);
  const BasicLocalSentence three{1, {parse("C(x)"), parse("~C(x)"), parse("forall y. C(y)")}};
  BasicLocalSentence shuffled = three;
  std::rotate(shuffled.psis.begin(), shuffled.psis.begin() + 1, shuffled.psis.end());
  CHECK(index(three) == index(shuffled));
  CHECK(index(three) == SentenceIndex::finite(9));
}

TEST_CASE("color swap covariance of the index") {
  for (const std::string& file : {"black_pixel.json", "domino.json", "three_in_row.json", "white_ball.json",
                                  "mixed_pair.json"}) {
    const BasicLocalSentence L = load(file);
    const FactoredPattern fp = factor(L);
    int expected = 0;
    for (const DescriptionSet& s : fp.slots) expected = std::max(expected, *s.min_white());
    INFO(file);
    CHECK(index(color_swap(L)) == SentenceIndex::finite(expected));
    CHECK(color_swap(fp) == factor(color_swap(L)));
  }
}

TEST_CASE("validate rejects malformed local sentences") {
  CHECK(code_of([] { validate(BasicLocalSentence{1, {}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { validate(BasicLocalSentence{1, {parse("C(x) & C(y)")}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { validate(BasicLocalSentence{-1, {parse("C(x)")}}); }) == ErrorCode::InvalidArgument);
  CHECK_NOTHROW(validate(load("white_ball.json")));
}

TEST_CASE("concat_horizontal") {
  const std::vector<Description> single = {center_black(1)};
  const RectTemplate one = concat_horizontal(single);
  CHECK(one.height() == 3);
  CHECK(one.width() == 3);
  CHECK(one.black_count() == 1);
  CHECK(one.cell(1, 1));
  for (int i = 0; i < 50; ++i) {
    const Image img = sample({6, 0.3, derive_seed(5, i)});
    const Pixel x{i % 6, (i / 6) % 6};
    CHECK(one.matches_at(img, x) == match_description(img, center_black(1), x));
  }

  const std::vector<Description> whites = {all_white(1), all_white(1)};
  const RectTemplate rect = concat_horizontal(whites);
  CHECK(rect.height() == 3);
  CHECK(rect.width() == 6);
  CHECK(rect.black_count() == 0);
  CHECK(rect.white_count() == 18);
  CHECK(rect.probability(0.5) == doctest::Approx(std::pow(0.5, 18)));
  CHECK(code_of([&] { rect.occurs(Image(5)); }) == ErrorCode::ImageTooSmall);
}

TEST_CASE("rectangle occurrence implies the pattern") {
  std::mt19937_64 rng(404);
  int occurrences = 0;
  for (int i = 0; i < 500; ++i) {
    const std::vector<Description> ds = {random_description(rng, 1), random_description(rng, 1)};
    Image img = sample({12, 0.5, derive_seed(12, i)});
    if (i % 2 == 0) {
      const Pixel anchor{static_cast<int>(rng() % 12), static_cast<int>(rng() % 12)};
      plant(img, ds[0], anchor);
      plant(img, ds[1], img.geometry().wrap_add(anchor, {0, 3}));
    }
    const RectTemplate rect = concat_horizontal(ds);
    const bool occurs = rect.occurs(img);
    occurrences += occurs;
    if (occurs) REQUIRE(match_factored(img, PatternSentence{1, ds}.factored()));
  }
  CHECK(occurrences >= 250);
}

TEST_CASE("description PBM round trip") {
  std::mt19937_64 rng(3);
  for (int r = 0; r <= 3; ++r) {
    const Description d = random_description(rng, r);
    CHECK(read_description(write_description(d)) == d);
  }
  CHECK(code_of([] { read_description("P1\n2 2\n0 1 1 0\n"); }) == ErrorCode::MalformedPBM);
}

TEST_CASE("JSON round trips") {
  const BasicLocalSentence L = load("mixed_pair.json");
  const BasicLocalSentence back = parse_local_sentence(write_local_sentence(L));
  CHECK(back.r == L.r);
  CHECK(back.psis == L.psis);
  const FactoredPattern fp = factor(load("domino.json"));
  CHECK(parse_factored_pattern(write_factored_pattern(fp)) == fp);
  CHECK(code_of([] { parse_local_sentence("{\"r\": 1}"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_local_sentence("not json"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_factored_pattern(R"({"r":1,"templates":{},"slots":[["t9"]]})"); }) ==
        ErrorCode::MalformedDocument);
}

TEST_CASE("radius-3 description sets") {
  DescriptionSet s(3);
  s.insert(center_black(3));
  s.insert(all_white(3));
  s.insert(center_black(3));
  CHECK(s.size() == 2);
  CHECK(s.min_black() == 0);
  CHECK(s.min_white() == 48);
  CHECK(s.first_minimal() == all_white(3));
  CHECK(s.complement().contains(all_white(3).complement()));
  Image img(8);
  img.set(Pixel{4, 4}, true);
  CHECK(match_factored(img, FactoredPattern{3, {s}}));
}
