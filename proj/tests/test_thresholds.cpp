#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "zolab/error.hpp"
#include "zolab/grid.hpp"
#include "zolab/rng.hpp"
#include "zolab/thresholds.hpp"

using namespace zolab;

namespace {

BasicLocalSentence load(const std::string& name) {
  std::ifstream in(std::string(ZOLAB_DATA_DIR) + "/" + name);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_local_sentence(ss.str());
}

const Formula kExistsBlack = fo::exists("x", fo::color("x"));

// Independent pattern check straight from ball codes (any slot order).
bool pattern_holds(int n, std::uint64_t mask, const FactoredPattern& fp) {
  const Image img = Image::from_mask(n, mask);
  const TorusGeometry g(n);
  std::vector<Pixel> chosen;
  auto rec = [&](auto&& self, std::size_t slot) -> bool {
    if (slot == fp.slots.size()) return true;
    for (int i = 0; i < n * n; ++i) {
      const Pixel x = g.pixel(i);
      if (!fp.slots[slot].contains(img.ball_code(x, fp.r))) continue;
      bool ok = true;
      for (const Pixel& y : chosen) ok = ok && g.distance(x, y) > 2 * fp.r;
      if (!ok) continue;
      chosen.push_back(x);
      if (self(self, slot + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return rec(rec, 0);
}

FactoredPattern single(const Description& d) { return PatternSentence{d.radius(), {d}}.factored(); }

}  // namespace

TEST_CASE("power-law rates") {
  CHECK(PowerLawRate{1.0, 2.0}.at(64) == doctest::Approx(1.0 / 4096));
  CHECK(PowerLawRate{1.0, 0.0}.at(10) == 0.5);
  CHECK(PowerLawRate{0.3, 0.0}.at(10) == doctest::Approx(0.3));
  CHECK_THROWS_AS(PowerLawRate({0.0, 1.0}).at(4), Error);
  CHECK_THROWS_AS(PowerLawRate({1.0, -1.0}).at(4), Error);
}

TEST_CASE("threshold exponents") {
  CHECK(threshold_exponent(load("black_pixel.json")).to_string() == "2");
  CHECK(threshold_exponent(load("domino.json")).to_string() == "1");
  CHECK(threshold_exponent(load("three_in_row.json")).to_string() == "2/3");
  CHECK(threshold_exponent(load("three_in_row.json")).value() == doctest::Approx(2.0 / 3));
  CHECK(threshold_exponent(load("white_ball.json")).kind == ThresholdExponent::Kind::AlwaysOne);
  CHECK(threshold_exponent(load("white_ball.json")).to_string() == "ALWAYS_ONE");
  CHECK(threshold_exponent(load("unsat.json")).to_string() == "UNSAT");
  CHECK(threshold_exponent(SentenceIndex::finite(4)).to_string() == "1/2");
}

TEST_CASE("classification examples") {
  CHECK(classify(SentenceIndex::finite(1), {1.0, 2.5}) == Limit::Zero);
  CHECK(classify(SentenceIndex::finite(2), {1.0, 0.9}) == Limit::One);
  CHECK(classify(SentenceIndex::finite(1), {1.0, 2.0}) == Limit::Indeterminate);
  CHECK(classify(SentenceIndex::finite(3), {1.0, 2.0 / 3.0}) == Limit::Indeterminate);
  CHECK(classify(SentenceIndex::finite(3), {0.4, 0.0}) == Limit::One);
  CHECK(classify(SentenceIndex::finite(0), {1.0, 5.0}) == Limit::One);
  CHECK(classify(SentenceIndex::infinity(), {1.0, 0.0}) == Limit::Zero);
  CHECK(classify(load("domino.json"), {1.0, 0.9}) == Limit::One);
  CHECK(classify(load("three_in_row.json"), {1.0, 0.9}) == Limit::Zero);
  CHECK_THROWS_AS(classify(SentenceIndex::finite(1), {-1.0, 1.0}), Error);
  CHECK(to_string(Limit::Indeterminate) == "INDETERMINATE");
}

TEST_CASE("bounds for a single centered black pixel") {
  const PatternBounds b = pattern_bounds(4, 0.1, single(center_black(1)));
  const double pi = 0.1 * std::pow(0.9, 8);
  CHECK(b.tau == 1);
  CHECK(b.upper == doctest::Approx(16 * pi).epsilon(1e-12));
  CHECK(b.upper == doctest::Approx(0.68875).epsilon(1e-4));
  CHECK(b.lower == doctest::Approx(pi).epsilon(1e-12));
  CHECK(b.lower == doctest::Approx(0.04305).epsilon(1e-3));
  CHECK(b.lower_exp == doctest::Approx(1 - std::exp(-pi)).epsilon(1e-12));
  CHECK_FALSE(b.upper_is_placement_union);
  CHECK_THROWS_AS(pattern_bounds(3, 0.1, single(center_black(1))), Error);
}

TEST_CASE("bounds at p = 0 and the radius-0 closed form") {
  const PatternBounds zero = pattern_bounds(8, 0.0, single(center_black(1)));
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == 0.0);
  const FactoredPattern black = factor(load("black_pixel.json"));
  for (int n : {2, 3, 4}) {
    for (double p : {0.05, 0.2, 0.5}) {
      const PatternBounds b = pattern_bounds(n, p, black);
      const double closed = 1 - std::pow(1 - p, n * n);
      CHECK(b.lower == doctest::Approx(closed).epsilon(1e-12));
      CHECK(exact_probability(Target{black}, n, p) == doctest::Approx(closed).epsilon(1e-12));
    }
  }
}

TEST_CASE("bounds stay finite where naive products underflow") {
  const PatternBounds b = pattern_bounds(4096, std::pow(4096.0, -2), single(center_black(1)));
  CHECK(b.upper > 0.0);
  CHECK(b.upper <= 1.0);
  CHECK(b.lower > 0.0);
  CHECK(b.lower <= b.upper);
}

TEST_CASE("sandwich on every small grid") {
  const std::vector<FactoredPattern> patterns = {
      single(center_black(1)), single(all_white(1)), single(Description(1, 0b000111000)),
      factor(load("domino.json")), factor(load("black_pixel.json")), single(Description(0, 0)),
      PatternSentence{0, {Description(0, 1), Description(0, 1)}}.factored(),
      PatternSentence{0, {Description(0, 1), Description(0, 0)}}.factored()};
  for (const FactoredPattern& fp : patterns) {
    for (int n = 2 * fp.r + 2; n <= 4; ++n) {
      for (double p : {0.05, 0.1, 0.3}) {
        const double truth =
            oracle::enumerate_probability(n * n, p, [&](std::uint64_t mask) { return pattern_holds(n, mask, fp); });
        const double exact = exact_probability(Target{fp}, n, p);
        const PatternBounds b = pattern_bounds(n, p, fp);
        INFO("r=" << fp.r << " m=" << fp.slots.size() << " n=" << n << " p=" << p);
        CHECK(exact == doctest::Approx(truth).epsilon(1e-12));
        CHECK(b.lower <= exact + 1e-15);
        CHECK(exact <= b.upper + 1e-15);
        CHECK(b.upper_is_placement_union == (fp.slots.size() > 1));
      }
    }
  }
}

TEST_CASE("exact probability examples") {
  CHECK(exact_probability(Target{kExistsBlack}, 2, 0.5) == doctest::Approx(15.0 / 16).epsilon(1e-15));
  CHECK(exact_probability(Target{kExistsBlack}, 3, 0.0) == 0.0);
  CHECK(exact_probability(Target{fo::negate(kExistsBlack)}, 3, 0.0) == 1.0);
  CHECK(exact_probability(Target{kWhiteTopBottom}, 3, 0.0) == 1.0);
  for (int n = 1; n <= 3; ++n) {
    for (double p : {0.1, 0.3, 0.5, 0.7}) {
      const double closed = 0.5 * (1 + std::pow(1 - 2 * p, n * n));
      CHECK(exact_probability(Target{ParityTarget{}}, n, p) == doctest::Approx(closed).epsilon(1e-12));
      CHECK(exact_probability(Target{ParityTarget{}}, n, p) ==
            doctest::Approx(parity_probability(n, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact probability of a formula matches the enumeration oracle") {
  const Formula f = parse("exists x. exists y. (D2(x,y) & C(x) & ~C(y))");
  const TorusGeometry g(3);
  const double truth = oracle::enumerate_probability(9, 0.35, [&](std::uint64_t mask) {
    for (int i = 0; i < 9; ++i) {
      const Pixel x = g.pixel(i);
      const int j = g.index(g.wrap_add(x, {1, -1}));
      if (((mask >> i) & 1U) && !((mask >> j) & 1U)) return true;
    }
    return false;
  });
  EnumerationOptions opts;
  opts.workers = 3;
  CHECK(exact_probability(Target{f}, 3, 0.35, opts) == doctest::Approx(truth).epsilon(1e-12));
}

TEST_CASE("enumeration limits") {
  CHECK_THROWS_AS(exact_probability(Target{kExistsBlack}, 5, 0.5), Error);
  EnumerationOptions big;
  big.max_enum_n = 6;
  try {
    exact_probability(Target{kExistsBlack}, 6, 0.5, big);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLargeToEnumerate);
  }
}

TEST_CASE("complement symmetry") {
  const std::vector<Target> targets = {Target{kExistsBlack}, Target{ParityTarget{}}, Target{kBlackLeftRight},
                                       Target{factor(load("black_pixel.json"))}};
  for (const Target& t : targets) {
    for (int n = 2; n <= 3; ++n) {
      for (double p : {0.2, 0.7}) {
        INFO(describe(t) << " n=" << n << " p=" << p);
        CHECK(std::abs(exact_probability(t, n, p) - exact_probability(color_swap(t), n, 1 - p)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("monotone target is nondecreasing in p") {
  double last = -1;
  for (int i = 0; i <= 20; ++i) {
    const double v = exact_probability(Target{kExistsBlack}, 3, i / 20.0);
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("wilson interval") {
  const WilsonInterval w = wilson_interval(50, 100);
  CHECK(w.low == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(w.high == doctest::Approx(0.59617).epsilon(1e-4));
  CHECK(wilson_interval(0, 100).low == 0.0);
  CHECK(wilson_interval(100, 100).high == doctest::Approx(1.0));
  CHECK(wilson_interval(0, 100).high > 0.0);
}

TEST_CASE("estimate examples") {
  const EstimateResult all = estimate(Target{kExistsBlack}, 5, 1.0, 100, 1);
  CHECK(all.phat == 1.0);
  CHECK(all.hits == 100);
  const EstimateResult r = estimate(Target{kExistsBlack}, 64, std::pow(64.0, -2), 100000, 17, {8, {}});
  const double closed = 1 - std::pow(1 - 1.0 / 4096, 4096);
  CHECK(std::abs(r.phat - closed) <= 0.005);
  CHECK(r.ci_low <= r.phat);
  CHECK(r.phat <= r.ci_high);
  CHECK(r.seed == 17);
  CHECK(r.samples == 100000);
}

TEST_CASE("estimate is independent of worker count") {
  const Target t{parse("exists x. (C(x) & exists y. (U(x,y) & C(y)))")};
  const EstimateResult a = estimate(t, 9, 0.2, 3000, 5, {1, {}});
  const EstimateResult b = estimate(t, 9, 0.2, 3000, 5, {3, {}});
  const EstimateResult c = estimate(t, 9, 0.2, 3000, 5, {8, {}});
  CHECK(a.hits == b.hits);
  CHECK(a.hits == c.hits);
}

TEST_CASE("estimate propagates evaluator refusals") {
  MonteCarloOptions opts;
  opts.eval.work_budget = 10;
  try {
    estimate(Target{parse("forall x. forall y. true")}, 6, 0.5, 10, 1, opts);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WorkBudgetExceeded);
  }
}

TEST_CASE("Wilson intervals are calibrated") {
  const double truth = 1 - std::pow(0.7, 9);
  int covered = 0;
  for (int s = 0; s < 200; ++s) {
    const EstimateResult r = estimate(Target{kExistsBlack}, 3, 0.3, 1000, 5000 + s, {4, {}});
    covered += r.ci_low <= truth && truth <= r.ci_high;
  }
  CHECK(covered >= 180);
}

TEST_CASE("sweep trends around the single-pixel threshold") {
  const std::vector<int> ns = {16, 32, 64, 128};
  const MonteCarloOptions opts{8, {}};
  const Target black{factor(load("black_pixel.json"))};

  const auto at = sweep(black, {1.0, 2.0}, ns, 20000, 3, opts);
  for (const SweepRow& row : at) {
    CHECK(std::abs(row.estimate.phat - (1 - std::exp(-1.0))) < 0.03);
    REQUIRE(row.classification);
    CHECK(*row.classification == Limit::Indeterminate);
    REQUIRE(row.bounds);
    CHECK(row.bounds->lower <= row.estimate.ci_high);
  }

  const auto above = sweep(black, {1.0, 3.0}, ns, 20000, 3, opts);
  for (std::size_t i = 1; i < above.size(); ++i) CHECK(above[i].estimate.phat < above[i - 1].estimate.phat);
  CHECK(*above.back().classification == Limit::Zero);

  const auto below = sweep(black, {1.0, 1.0}, ns, 2000, 3, opts);
  for (const SweepRow& row : below) CHECK(row.estimate.phat > 0.99);
  CHECK(*below.back().classification == Limit::One);
}

TEST_CASE("sweep rows are reproducible and carry the master seed") {
  const std::vector<int> ns = {8, 12};
  const auto a = sweep(Target{kExistsBlack}, {1.0, 2.0}, ns, 500, 42, {1, {}});
  const auto b = sweep(Target{kExistsBlack}, {1.0, 2.0}, ns, 500, 42, {4, {}});
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].estimate.hits == b[i].estimate.hits);
    CHECK(a[i].estimate.seed == 42);
    CHECK_FALSE(a[i].bounds);
    CHECK_FALSE(a[i].classification);
  }
  const EstimateResult direct = estimate(Target{kExistsBlack}, 12, PowerLawRate{1.0, 2.0}.at(12), 500,
                                         derive_seed(42, 12));
  CHECK(direct.hits == a[1].estimate.hits);
}

TEST_CASE("sweep CSV rows") {
  SweepRow row;
  row.estimate = EstimateResult{16, 0.25, 100, 40, 0.4, 0.3, 0.5, 9};
  CHECK(sweep_csv_row(row) == "16,0.25,100,40,0.4,0.3,0.5,,,");
  row.bounds = PatternBounds{0.125, 0.1, 1.0, 4, false};
  row.classification = Limit::One;
  CHECK(sweep_csv_row(row) == "16,0.25,100,40,0.4,0.3,0.5,0.125,1,ONE");
  CHECK(std::string(kSweepCsvHeader) ==
        "n,p,samples,hits,phat,ci_low,ci_high,lower_bound,upper_bound,classification");
}

TEST_CASE("target descriptions") {
  CHECK(describe(Target{kExistsBlack}) == "formula:exists x. C(x)");
  CHECK(describe(Target{kBlackLeftRight}) == "crossing:blr");
  CHECK(describe(Target{ParityTarget{}}) == "parity:black");
  CHECK(describe(color_swap(Target{ParityTarget{}})) == "parity:white");
  CHECK(describe(Target{factor(load("mixed_pair.json"))}) == "pattern:r=1,slots=[1,1]");
}
