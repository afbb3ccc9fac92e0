#include "zolab/thresholds.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "zolab/error.hpp"
#include "zolab/parallel.hpp"
#include "zolab/rng.hpp"

namespace zolab {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "probability must lie in [0,1]");
}

void check_rate(const PowerLawRate& rate) {
  if (!(std::isfinite(rate.c) && rate.c > 0.0) || !(std::isfinite(rate.alpha) && rate.alpha >= 0.0)) {
    throw Error(ErrorCode::UnsupportedRate,
                "rates must have the form c n^-alpha with c > 0 and alpha >= 0");
  }
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// P[slot matches at one fixed center].
double slot_mass(const DescriptionSet& slot, double p) {
  const auto& hist = slot.count_by_black();
  const int cells = static_cast<int>(hist.size()) - 1;
  CompensatedSum sum;
  for (int k = 0; k <= cells; ++k) {
    if (hist[static_cast<std::size_t>(k)] != 0) {
      sum.add(static_cast<double>(hist[static_cast<std::size_t>(k)]) *
              description_probability(k, cells - k, p));
    }
  }
  return clamp01(sum.value());
}

// P[Binomial(trials, prob) <= at_most].
double binomial_cdf(std::int64_t at_most, std::int64_t trials, double prob) {
  if (at_most >= trials) return 1.0;
  if (prob <= 0.0) return 1.0;
  if (prob >= 1.0) return 0.0;
  CompensatedSum sum;
  const double log_p = std::log(prob);
  const double log_q = std::log1p(-prob);
  const double log_n_fact = std::lgamma(static_cast<double>(trials) + 1.0);
  for (std::int64_t l = 0; l <= at_most; ++l) {
    const double log_term = log_n_fact - std::lgamma(static_cast<double>(l) + 1.0) -
                            std::lgamma(static_cast<double>(trials - l) + 1.0) +
                            static_cast<double>(l) * log_p +
                            static_cast<double>(trials - l) * log_q;
    sum.add(std::exp(log_term));
  }
  return clamp01(sum.value());
}

// 1 - (1 - q)^tau
double at_least_once(double q, std::int64_t tau) {
  if (tau <= 0 || q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  return clamp01(-std::expm1(static_cast<double>(tau) * std::log1p(-q)));
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

double PowerLawRate::at(int n) const {
  check_rate(*this);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  return std::min(0.5, c * std::pow(static_cast<double>(n), -alpha));
}

std::string to_string(Limit limit) {
  switch (limit) {
    case Limit::Zero: return "ZERO";
    case Limit::One: return "ONE";
    case Limit::Indeterminate: return "INDETERMINATE";
  }
  return "?";
}

std::string ThresholdExponent::to_string() const {
  switch (kind) {
    case Kind::AlwaysOne: return "ALWAYS_ONE";
    case Kind::Unsat: return "UNSAT";
    case Kind::Finite: break;
  }
  if (denominator == 1) return std::to_string(numerator);
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

ThresholdExponent threshold_exponent(const SentenceIndex& k) {
  ThresholdExponent out;
  if (k.is_infinite()) {
    out.kind = ThresholdExponent::Kind::Unsat;
  } else if (k.value() == 0) {
    out.kind = ThresholdExponent::Kind::AlwaysOne;
  } else {
    const int g = std::gcd(2, k.value());
    out.numerator = 2 / g;
    out.denominator = k.value() / g;
  }
  return out;
}

ThresholdExponent threshold_exponent(const BasicLocalSentence& sentence, const LocalOptions& options) {
  return threshold_exponent(index(sentence, options));
}

Limit classify(const SentenceIndex& k, const PowerLawRate& rate) {
  check_rate(rate);
  if (k.is_infinite()) return Limit::Zero;
  if (k.value() == 0) return Limit::One;
  // alpha versus 2/k, compared as alpha*k versus 2.
  const double scaled = rate.alpha * k.value();
  if (std::abs(scaled - 2.0) <= 1e-12) return Limit::Indeterminate;
  return scaled > 2.0 ? Limit::Zero : Limit::One;
}

Limit classify(const BasicLocalSentence& sentence, const PowerLawRate& rate, const LocalOptions& options) {
  check_rate(rate);
  return classify(index(sentence, options), rate);
}

// ---------------------------------------------------------------------------
// Targets

std::string describe(const Target& target) {
  return std::visit(
      Overloaded{
          [](const Formula& f) { return "formula:" + to_string(f); },
          [](const FactoredPattern& fp) {
            std::string out = "pattern:r=" + std::to_string(fp.r) + ",slots=[";
            for (std::size_t i = 0; i < fp.slots.size(); ++i) {
              if (i != 0) out += ',';
              out += std::to_string(fp.slots[i].size());
            }
            return out + "]";
          },
          [](const CrossingSpec& spec) { return "crossing:" + to_string(spec); },
          [](const ParityTarget& t) {
            return std::string("parity:") + (t.counted == CrossingColor::Black ? "black" : "white");
          },
      },
      target);
}

Target color_swap(const Target& target) {
  return std::visit(
      Overloaded{
          [](const Formula& f) -> Target { return color_swap(f); },
          [](const FactoredPattern& fp) -> Target { return color_swap(fp); },
          [](const CrossingSpec& spec) -> Target {
            CrossingSpec out = spec;
            out.color = spec.color == CrossingColor::Black ? CrossingColor::White : CrossingColor::Black;
            return out;
          },
          [](const ParityTarget& t) -> Target {
            return ParityTarget{t.counted == CrossingColor::Black ? CrossingColor::White
                                                                  : CrossingColor::Black};
          },
      },
      target);
}

PreparedTarget::PreparedTarget(const Target& target, EvalOptions eval)
    : target_(target), eval_(eval) {
  if (const auto* f = std::get_if<Formula>(&target)) {
    check_well_formed(*f);
    compiled_ = std::make_shared<const CompiledFormula>(*f);
  }
}

bool PreparedTarget::operator()(const Image& img) const {
  return std::visit(
      Overloaded{
          [&](const Formula&) { return compiled_->evaluate(img, {}, nullptr, eval_); },
          [&](const FactoredPattern& fp) { return match_factored(img, fp); },
          [&](const CrossingSpec& spec) { return crosses(img, spec); },
          [&](const ParityTarget& t) {
            const std::int64_t black = img.black_count();
            const std::int64_t counted = t.counted == CrossingColor::Black ? black : img.cells() - black;
            return counted % 2 == 0;
          },
      },
      target_);
}

// ---------------------------------------------------------------------------
// Bounds

PatternBounds pattern_bounds(int n, double p, const FactoredPattern& fp) {
  check_probability(p);
  if (fp.slots.empty()) throw Error(ErrorCode::InvalidArgument, "pattern needs at least one slot");
  if (n < 2 * fp.r + 2) {
    throw Error(ErrorCode::ImageTooSmall,
                "bounds need n >= " + std::to_string(2 * fp.r + 2) + ", got n=" + std::to_string(n));
  }
  PatternBounds out;
  out.tau = tiling_size(n, fp.r);
  const double cells = static_cast<double>(n) * n;
  const std::size_t m = fp.slots.size();

  std::vector<double> masses;
  for (const auto& slot : fp.slots) masses.push_back(slot_mass(slot, p));

  if (m == 1) {
    out.upper = clamp01(cells * masses[0]);
    out.lower = at_least_once(masses[0], out.tau);
    out.lower_exp = clamp01(-std::expm1(-static_cast<double>(out.tau) * masses[0]));
    return out;
  }

  out.upper_is_placement_union = true;
  double smallest = 1.0;
  double log_product = 0.0;
  bool product_zero = false;
  for (double mass : masses) {
    smallest = std::min(smallest, cells * mass);
    if (mass <= 0.0) product_zero = true;
    else log_product += std::log(cells * mass);
  }
  out.upper = clamp01(std::min(smallest, product_zero ? 0.0 : std::exp(log_product)));

  // Lower bound: each distinct minimal description appears at >= m tiling
  // centers, so distinct centers can be assigned to all slots.
  std::set<Description> minimal;
  for (const auto& slot : fp.slots) {
    auto d = slot.first_minimal();
    if (!d) return out;  // unsatisfiable: lower stays 0
    minimal.insert(*d);
  }
  CompensatedSum failure;
  for (const auto& d : minimal) {
    const double pi = description_probability(d.black_count(), d.white_count(), p);
    failure.add(binomial_cdf(static_cast<std::int64_t>(m) - 1, out.tau, pi));
  }
  out.lower = clamp01(1.0 - failure.value());
  return out;
}

// ---------------------------------------------------------------------------
// Probabilities

double exact_probability(const Target& target, int n, double p, const EnumerationOptions& options) {
  check_probability(p);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const int cap = std::min(options.max_enum_n, 5);
  if (n > cap) {
    throw Error(ErrorCode::TooLargeToEnumerate,
                "enumerating 2^" + std::to_string(n * n) + " images exceeds the cap n <= " +
                    std::to_string(cap));
  }
  const PreparedTarget satisfied(target, options.eval);
  const int cells = n * n;
  const std::uint64_t total = std::uint64_t{1} << cells;

  // Hit counts per black-pixel count are exact integers, so the result is
  // independent of how the range is split.
  constexpr std::size_t kChunks = 64;
  std::vector<std::vector<std::uint64_t>> parts(kChunks, std::vector<std::uint64_t>(cells + 1, 0));
  parallel_chunks(total, kChunks, options.workers,
                  [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
                    auto& hist = parts[c];
                    for (std::uint64_t mask = begin; mask < end; ++mask) {
                      if (satisfied(Image::from_mask(n, mask))) ++hist[std::popcount(mask)];
                    }
                  });
  CompensatedSum sum;
  for (int k = 0; k <= cells; ++k) {
    std::uint64_t hits = 0;
    for (const auto& hist : parts) hits += hist[static_cast<std::size_t>(k)];
    if (hits != 0) sum.add(static_cast<double>(hits) * description_probability(k, cells - k, p));
  }
  return clamp01(sum.value());
}

WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t samples) {
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const double count = static_cast<double>(samples);
  const double phat = static_cast<double>(hits) / count;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / count;
  const double center = (phat + z2 / (2.0 * count)) / denom;
  const double half =
      kWilsonZ / denom * std::sqrt(phat * (1.0 - phat) / count + z2 / (4.0 * count * count));
  WilsonInterval ci{clamp01(center - half), clamp01(center + half)};
  ci.low = std::min(ci.low, phat);
  ci.high = std::max(ci.high, phat);
  return ci;
}

EstimateResult estimate(const Target& target, int n, double p, std::uint64_t samples,
                        std::uint64_t seed, const MonteCarloOptions& options) {
  check_probability(p);
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const PreparedTarget satisfied(target, options.eval);

  constexpr std::size_t kChunks = 64;
  std::vector<std::uint64_t> hits(kChunks, 0);
  parallel_chunks(samples, kChunks, options.workers,
                  [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t i = begin; i < end; ++i) {
                      const Image img = sample({n, p, derive_seed(seed, i)});
                      if (satisfied(img)) ++hits[c];
                    }
                  });

  EstimateResult out;
  out.n = n;
  out.p = p;
  out.samples = samples;
  out.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  out.phat = static_cast<double>(out.hits) / static_cast<double>(samples);
  const auto ci = wilson_interval(out.hits, samples);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  out.seed = seed;
  return out;
}

std::vector<SweepRow> sweep(const Target& target, const PowerLawRate& rate, std::span<const int> n_list,
                            std::uint64_t samples, std::uint64_t seed, const MonteCarloOptions& options) {
  check_rate(rate);
  std::optional<Limit> classification;
  const auto* fp = std::get_if<FactoredPattern>(&target);
  if (fp != nullptr) classification = classify(index(*fp), rate);

  std::vector<SweepRow> rows;
  for (int n : n_list) {
    const double p = rate.at(n);
    SweepRow row;
    row.estimate = estimate(target, n, p, samples, derive_seed(seed, static_cast<std::uint64_t>(n)), options);
    row.estimate.seed = seed;
    if (fp != nullptr && n >= 2 * fp->r + 2) row.bounds = pattern_bounds(n, p, *fp);
    row.classification = classification;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv_row(const SweepRow& row) {
  const auto& e = row.estimate;
  std::string out = std::to_string(e.n) + "," + format_double(e.p) + "," + std::to_string(e.samples) +
                    "," + std::to_string(e.hits) + "," + format_double(e.phat) + "," +
                    format_double(e.ci_low) + "," + format_double(e.ci_high) + ",";
  if (row.bounds) out += format_double(row.bounds->lower);
  out += ",";
  if (row.bounds) out += format_double(row.bounds->upper);
  out += ",";
  if (row.classification) out += to_string(*row.classification);
  return out;
}

}  // namespace zolab
