#include "zolab/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "zolab/error.hpp"

namespace zolab {

TorusGeometry::TorusGeometry(int n) : n_(n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidArgument, "side length must be >= 1, got " + std::to_string(n));
  }
}

int TorusGeometry::distance(Pixel x, Pixel y) const noexcept {
  auto circular = [this](int a, int b) {
    int d = std::abs(a - b);
    return std::min(d, n_ - d);
  };
  return std::max(circular(x.row, y.row), circular(x.col, y.col));
}

std::vector<Pixel> TorusGeometry::ball(Pixel x, int r) const {
  if (r < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative radius");
  }
  if (2 * r + 1 > n_) {
    throw Error(ErrorCode::BallTooLarge, "ball of radius " + std::to_string(r) +
                                             " wraps onto itself for n=" + std::to_string(n_));
  }
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      out.push_back(wrap_add(x, {dr, dc}));
    }
  }
  return out;
}

std::vector<Pixel> TorusGeometry::tiling(int r) const {
  if (r < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative radius");
  }
  const int side = 2 * r + 1;
  const int per_axis = n_ / side;
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (int a = 0; a < per_axis; ++a) {
    for (int b = 0; b < per_axis; ++b) {
      out.push_back({r + a * side, r + b * side});
    }
  }
  return out;
}

std::int64_t tiling_size(int n, int r) {
  const std::int64_t per_axis = n / (2 * r + 1);
  return per_axis * per_axis;
}

}  // namespace zolab
