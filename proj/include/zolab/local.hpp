#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/eval.hpp"
#include "zolab/formula.hpp"
#include "zolab/image.hpp"

namespace zolab {

// Descriptions are stored as 64-bit codes, so radius <= 3.
constexpr int kMaxDescriptionRadius = 3;
// Ball enumeration never goes past 2^25 colorings (radius 2).
constexpr int kMaxEnumerationRadius = 2;

constexpr int ball_side(int r) { return 2 * r + 1; }
constexpr int ball_cells(int r) { return ball_side(r) * ball_side(r); }

// p^k (1-p)^h, computed in log space.
double description_probability(int black, int white, double p);

// Complete description of a radius-r ball: the colors of its (2r+1)^2
// pixels, bit i = i-th offset in row-major order.
class Description {
 public:
  Description(int r, std::uint64_t code);
  // Rows of '0'/'1' characters; the grid must be square with odd side.
  static Description from_rows(std::span<const std::string> rows);

  int radius() const noexcept { return r_; }
  int side() const noexcept { return ball_side(r_); }
  int cells() const noexcept { return ball_cells(r_); }
  std::uint64_t code() const noexcept { return code_; }
  bool cell(int i) const noexcept { return (code_ >> i) & 1U; }
  bool cell(int row, int col) const noexcept { return cell(row * side() + col); }
  int black_count() const noexcept;
  int white_count() const noexcept { return cells() - black_count(); }
  Description complement() const;

  friend auto operator<=>(const Description&, const Description&) = default;

 private:
  int r_;
  std::uint64_t code_;
};

Description all_white(int r);
Description center_black(int r);  // black center, white elsewhere

// PBM template with a "# radius r" comment line.
std::string write_description(const Description& d);
Description read_description(std::string_view text);

// Set of same-radius descriptions. Radius <= 2 uses a membership bitmap over
// every code; radius 3 keeps sorted codes.
class DescriptionSet {
 public:
  explicit DescriptionSet(int r);
  static DescriptionSet from_bitmap(int r, std::vector<std::uint64_t> bitmap);

  int radius() const noexcept { return r_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  void insert(const Description& d);
  bool contains(std::uint64_t code) const noexcept;
  bool contains(const Description& d) const noexcept {
    return d.radius() == r_ && contains(d.code());
  }

  // Number of members with exactly k black pixels, k = 0..cells.
  const std::vector<std::uint64_t>& count_by_black() const noexcept { return by_black_; }
  std::optional<int> min_black() const noexcept;
  std::optional<int> min_white() const noexcept;
  // Smallest code among members with min_black() black pixels.
  std::optional<Description> first_minimal() const;

  // Members in ascending code order.
  std::vector<Description> members() const;
  DescriptionSet complement() const;

  friend bool operator==(const DescriptionSet&, const DescriptionSet&) = default;

 private:
  bool dense() const noexcept { return ball_cells(r_) <= 25; }

  int r_;
  std::vector<std::uint64_t> bitmap_;
  std::vector<std::uint64_t> sparse_;
  std::vector<std::uint64_t> by_black_;
  std::size_t size_ = 0;
};

// exists x_1..x_m, pairwise distance > 2r, x_i matching some member of
// slots[i]. An empty slot makes the pattern unsatisfiable.
struct FactoredPattern {
  int r = 0;
  std::vector<DescriptionSet> slots;

  friend bool operator==(const FactoredPattern&, const FactoredPattern&) = default;
};

struct PatternSentence {
  int r = 0;
  std::vector<Description> slots;

  FactoredPattern factored() const;
};

// exists x_1..x_m, pairwise distance > 2r, psi_i(x_i) with every psi_i
// relativized to the radius-r ball around its free variable.
struct BasicLocalSentence {
  int r = 0;
  std::vector<Formula> psis;
};

// Each psi has at most one free variable and is well formed; m >= 1.
void validate(const BasicLocalSentence& sentence);

struct LocalOptions {
  int max_radius = kMaxEnumerationRadius;
  unsigned workers = 1;
  EvalOptions eval;
};

// Matching needs n >= 2r+2 so a ball has no wrap-induced adjacencies.
bool match_description(const Image& img, const Description& d, Pixel center);
bool match_factored(const Image& img, const FactoredPattern& fp);
// Centers realizing the pattern, in slot order, when it matches.
std::optional<std::vector<Pixel>> find_witness(const Image& img, const FactoredPattern& fp);

// All descriptions D of radius r with D -> psi, found by evaluating psi at
// the center of every coloring of a plain (2r+1)x(2r+1) grid.
DescriptionSet descriptions_implying(const Formula& psi, int r, const LocalOptions& options = {});

FactoredPattern factor(const BasicLocalSentence& sentence, const LocalOptions& options = {});

class SentenceIndex {
 public:
  static SentenceIndex finite(int k) { return SentenceIndex(k); }
  static SentenceIndex infinity() { return SentenceIndex(-1); }

  bool is_infinite() const noexcept { return k_ < 0; }
  int value() const noexcept { return k_; }
  std::string to_string() const { return is_infinite() ? "INFINITY" : std::to_string(k_); }

  friend bool operator==(const SentenceIndex&, const SentenceIndex&) = default;

 private:
  explicit SentenceIndex(int k) : k_(k) {}
  int k_;
};

// max over slots of the minimal black count in the slot; infinite when a
// slot is empty.
SentenceIndex index(const FactoredPattern& fp);
SentenceIndex index(const BasicLocalSentence& sentence, const LocalOptions& options = {});

// Rectangle of m consecutive descriptions placed side by side along columns.
// Its presence anywhere on the torus implies the pattern sentence of the
// same descriptions when n >= m(2r+1).
class RectTemplate {
 public:
  RectTemplate(int r, int height, int width, std::vector<std::uint8_t> cells);

  int radius() const noexcept { return r_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool cell(int row, int col) const noexcept {
    return cells_[static_cast<std::size_t>(row * width_ + col)] != 0;
  }
  int black_count() const noexcept { return black_; }
  int white_count() const noexcept { return height_ * width_ - black_; }
  // Occurrence probability at one anchor: p^K (1-p)^H.
  double probability(double p) const { return description_probability(black_, white_count(), p); }

  // Anchor is the center of the first ball; cell (a, b) sits at
  // anchor + (a - r, b - r).
  bool matches_at(const Image& img, Pixel anchor) const;
  bool occurs(const Image& img) const;

 private:
  void check_fits(const Image& img) const;

  int r_;
  int height_;
  int width_;
  std::vector<std::uint8_t> cells_;
  int black_ = 0;
};

RectTemplate concat_horizontal(std::span<const Description> descs);

// First-order sentence with the same meaning as the basic local sentence,
// using dist> guards and ball-relativized quantifiers.
Formula to_sentence(const BasicLocalSentence& sentence);

BasicLocalSentence color_swap(const BasicLocalSentence& sentence);
FactoredPattern color_swap(const FactoredPattern& fp);

// {"r": 1, "psis": ["C(x)", ...]}
BasicLocalSentence parse_local_sentence(std::string_view json_text);
std::string write_local_sentence(const BasicLocalSentence& sentence);
// {"r": 1, "templates": {"t0": "<PBM>", ...}, "slots": [["t0", ...], ...]}
FactoredPattern parse_factored_pattern(std::string_view json_text);
std::string write_factored_pattern(const FactoredPattern& fp);

}  // namespace zolab
