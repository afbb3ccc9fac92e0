#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zolab/eval.hpp"
#include "zolab/local.hpp"
#include "zolab/percolation.hpp"

namespace zolab {

// p(n) = min(c * n^-alpha, 1/2).
struct PowerLawRate {
  double c = 1.0;
  double alpha = 0.0;

  double at(int n) const;
};

enum class Limit { Zero, One, Indeterminate };
std::string to_string(Limit limit);

struct ThresholdExponent {
  enum class Kind { Finite, AlwaysOne, Unsat };
  Kind kind = Kind::Finite;
  int numerator = 2;    // exponent = numerator / denominator, reduced
  int denominator = 1;

  double value() const { return static_cast<double>(numerator) / denominator; }
  std::string to_string() const;
};

// Threshold function n^(-2/k) for index k.
ThresholdExponent threshold_exponent(const SentenceIndex& k);
ThresholdExponent threshold_exponent(const BasicLocalSentence& sentence,
                                     const LocalOptions& options = {});

// Limit of the sentence probability along p(n) = c n^-alpha, alpha >= 0.
Limit classify(const SentenceIndex& k, const PowerLawRate& rate);
Limit classify(const BasicLocalSentence& sentence, const PowerLawRate& rate,
               const LocalOptions& options = {});

// "The number of pixels of this color is even."
struct ParityTarget {
  CrossingColor counted = CrossingColor::Black;
};

using Target = std::variant<Formula, FactoredPattern, CrossingSpec, ParityTarget>;

std::string describe(const Target& target);
Target color_swap(const Target& target);

// Target ready for repeated evaluation; formulas are compiled once.
class PreparedTarget {
 public:
  explicit PreparedTarget(const Target& target, EvalOptions eval = {});
  bool operator()(const Image& img) const;

 private:
  const Target& target_;
  EvalOptions eval_;
  std::shared_ptr<const CompiledFormula> compiled_;
};

struct PatternBounds {
  double lower = 0.0;      // certified lower bound
  double lower_exp = 0.0;  // 1 - exp(-tau * pi); m = 1 only, weaker than lower
  double upper = 1.0;      // certified upper bound
  std::int64_t tau = 0;    // tiling size floor(n/(2r+1))^2
  // True for m > 1, where upper is a union bound over anchored placements
  // rather than the single-pattern bound n^2 P[slot].
  bool upper_is_placement_union = false;
};

PatternBounds pattern_bounds(int n, double p, const FactoredPattern& fp);

struct EnumerationOptions {
  int max_enum_n = 4;  // hard limit 5 (2^25 images)
  unsigned workers = 1;
  EvalOptions eval;
};

// Sum of mu_{n,p}(image) over the images satisfying the target.
double exact_probability(const Target& target, int n, double p,
                         const EnumerationOptions& options = {});

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// 95% Wilson score interval.
WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t samples);

struct EstimateResult {
  int n = 0;
  double p = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double phat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed = 0;
};

struct MonteCarloOptions {
  unsigned workers = 1;
  EvalOptions eval;
};

// Replicate i is the image sampled with seed derive_seed(seed, i).
EstimateResult estimate(const Target& target, int n, double p, std::uint64_t samples,
                        std::uint64_t seed, const MonteCarloOptions& options = {});

struct SweepRow {
  EstimateResult estimate;
  std::optional<PatternBounds> bounds;
  std::optional<Limit> classification;
};

// One estimate per n at p = rate.at(n); row for n uses the replicate stream
// derive_seed(seed, n). Bounds and classification are filled for pattern
// targets.
std::vector<SweepRow> sweep(const Target& target, const PowerLawRate& rate,
                            std::span<const int> n_list, std::uint64_t samples,
                            std::uint64_t seed, const MonteCarloOptions& options = {});

// n,p,samples,hits,phat,ci_low,ci_high,lower_bound,upper_bound,classification
inline constexpr const char* kSweepCsvHeader =
    "n,p,samples,hits,phat,ci_low,ci_high,lower_bound,upper_bound,classification";
std::string sweep_csv_row(const SweepRow& row);

}  // namespace zolab
