#pragma once

#include <cstdint>
#include <string>

#include "zolab/image.hpp"

namespace zolab {

enum class CrossingColor { Black, White };
enum class CrossingDirection { LeftRight, TopBottom };

// Monochromatic 6-connected crossing: steps +-(1,0), +-(0,1), +-(1,1) on the
// planar grid, no wraparound. Left-right joins column 0 to column n-1;
// top-bottom joins row 0 to row n-1.
struct CrossingSpec {
  CrossingColor color = CrossingColor::Black;
  CrossingDirection direction = CrossingDirection::LeftRight;

  friend bool operator==(const CrossingSpec&, const CrossingSpec&) = default;
};

inline constexpr CrossingSpec kBlackLeftRight{CrossingColor::Black, CrossingDirection::LeftRight};
inline constexpr CrossingSpec kWhiteTopBottom{CrossingColor::White, CrossingDirection::TopBottom};

std::string to_string(const CrossingSpec& spec);
CrossingSpec parse_crossing(const std::string& name);  // "blr", "wtb", "wlr", "btb"

bool crosses(const Image& img, const CrossingSpec& spec);

struct DualityReport {
  std::uint64_t total = 0;
  std::uint64_t violations = 0;    // images where BLR == WTB
  std::uint64_t blr_count = 0;
};

// Exhaustive over all 2^(n^2) images; n <= max_n and n*n <= 36.
DualityReport duality_check(int n, int max_n = 4, unsigned workers = 1);

}  // namespace zolab
