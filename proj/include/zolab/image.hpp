#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/grid.hpp"

namespace zolab {

// n x n binary image on the torus, 1 = black. Bit-packed, row-major: pixel
// (row, col) is bit row*n + col.
class Image {
 public:
  Image() : Image(1) {}
  explicit Image(int n);

  static Image filled(int n, bool black);
  // Requires n*n <= 64; bit i of mask is pixel i in row-major order.
  static Image from_mask(int n, std::uint64_t mask);

  int n() const noexcept { return n_; }
  TorusGeometry geometry() const { return TorusGeometry(n_); }
  std::int64_t cells() const noexcept { return std::int64_t{n_} * n_; }

  bool get(std::int64_t index) const noexcept {
    return (words_[static_cast<std::size_t>(index >> 6)] >> (index & 63)) & 1U;
  }
  bool get(Pixel x) const noexcept { return get(std::int64_t{x.row} * n_ + x.col); }
  void set(std::int64_t index, bool black) noexcept {
    auto& w = words_[static_cast<std::size_t>(index >> 6)];
    const std::uint64_t bit = std::uint64_t{1} << (index & 63);
    w = black ? (w | bit) : (w & ~bit);
  }
  void set(Pixel x, bool black) noexcept { set(std::int64_t{x.row} * n_ + x.col, black); }

  std::int64_t black_count() const noexcept;
  // Row-major indices of black pixels, ascending.
  std::vector<std::int64_t> black_indices() const;

  // Colors of the ball of radius r around center, bit i = i-th offset in
  // row-major (-r..r)^2 order. Requires (2r+1)^2 <= 64.
  std::uint64_t ball_code(Pixel center, int r) const noexcept;

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  friend Image complement(const Image& img);

  int n_;
  std::vector<std::uint64_t> words_;
};

struct SampleSpec {
  int n = 1;
  double p = 0.5;
  std::uint64_t seed = 0;
};

enum class SamplingPath {
  Auto,    // sparse when p <= 1/16 or p >= 15/16, dense otherwise
  Dense,   // one Bernoulli draw per pixel
  Sparse,  // binomial count, then uniformly placed distinct pixels
};

// Draw from the product Bernoulli(p) measure on n x n images. A pure
// function of (n, p, seed) and the path.
Image sample(const SampleSpec& spec, SamplingPath path = SamplingPath::Auto);

Image complement(const Image& img);

inline std::int64_t black_count(const Image& img) { return img.black_count(); }

// Probability that the number of black pixels is even: (1 + (1-2p)^(n^2)) / 2.
double parity_probability(int n, double p);

Image read_pbm(std::string_view text);
std::string write_pbm(const Image& img);

}  // namespace zolab
