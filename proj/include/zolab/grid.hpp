#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace zolab {

// 0-based pixel coordinates. Published formulas index pixels from 1; shift
// by one when comparing.
struct Pixel {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct Offset {
  int drow = 0;
  int dcol = 0;
};

// Side length of the n x n periodic pixel lattice with 8-connectivity.
class TorusGeometry {
 public:
  explicit TorusGeometry(int n);

  int n() const noexcept { return n_; }
  std::int64_t cells() const noexcept { return std::int64_t{n_} * n_; }

  int wrap(int coordinate) const noexcept {
    int m = coordinate % n_;
    return m < 0 ? m + n_ : m;
  }

  Pixel wrap_add(Pixel x, Offset offset) const noexcept {
    return {wrap(x.row + offset.drow), wrap(x.col + offset.dcol)};
  }

  // Graph distance under 8-connectivity: toroidal Chebyshev distance.
  int distance(Pixel x, Pixel y) const noexcept;

  std::int64_t index(Pixel x) const noexcept { return std::int64_t{x.row} * n_ + x.col; }
  Pixel pixel(std::int64_t index) const noexcept {
    return {static_cast<int>(index / n_), static_cast<int>(index % n_)};
  }

  // Pixels within distance r of x, in row-major order of offsets
  // (-r..r) x (-r..r). Throws BallTooLarge when 2r+1 > n.
  std::vector<Pixel> ball(Pixel x, int r) const;

  // Centers (r + a(2r+1), r + b(2r+1)) for a, b < floor(n/(2r+1)); the
  // radius-r balls around them are pairwise disjoint.
  std::vector<Pixel> tiling(int r) const;

 private:
  int n_;
};

inline Pixel wrap_add(const TorusGeometry& geom, Pixel x, Offset offset) {
  return geom.wrap_add(x, offset);
}

// floor(n/(2r+1))^2
std::int64_t tiling_size(int n, int r);

}  // namespace zolab
