#include "zolab/percolation.hpp"

#include <vector>

#include "zolab/error.hpp"
#include "zolab/parallel.hpp"

namespace zolab {

std::string to_string(const CrossingSpec& spec) {
  std::string out = spec.color == CrossingColor::Black ? "b" : "w";
  out += spec.direction == CrossingDirection::LeftRight ? "lr" : "tb";
  return out;
}

CrossingSpec parse_crossing(const std::string& name) {
  if (name == "blr") return {CrossingColor::Black, CrossingDirection::LeftRight};
  if (name == "btb") return {CrossingColor::Black, CrossingDirection::TopBottom};
  if (name == "wlr") return {CrossingColor::White, CrossingDirection::LeftRight};
  if (name == "wtb") return {CrossingColor::White, CrossingDirection::TopBottom};
  throw Error(ErrorCode::InvalidArgument, "unknown crossing '" + name + "' (blr, btb, wlr, wtb)");
}

bool crosses(const Image& img, const CrossingSpec& spec) {
  static constexpr int kSteps[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
  const int n = img.n();
  const bool want = spec.color == CrossingColor::Black;
  const bool left_right = spec.direction == CrossingDirection::LeftRight;

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n) * n, 0);
  std::vector<Pixel> stack;
  for (int i = 0; i < n; ++i) {
    const Pixel start = left_right ? Pixel{i, 0} : Pixel{0, i};
    if (img.get(start) == want) {
      seen[static_cast<std::size_t>(start.row * n + start.col)] = 1;
      stack.push_back(start);
    }
  }
  while (!stack.empty()) {
    const Pixel x = stack.back();
    stack.pop_back();
    if ((left_right ? x.col : x.row) == n - 1) return true;
    for (const auto& step : kSteps) {
      const Pixel y{x.row + step[0], x.col + step[1]};
      if (y.row < 0 || y.row >= n || y.col < 0 || y.col >= n) continue;
      auto& mark = seen[static_cast<std::size_t>(y.row * n + y.col)];
      if (mark != 0 || img.get(y) != want) continue;
      mark = 1;
      stack.push_back(y);
    }
  }
  return false;
}

DualityReport duality_check(int n, int max_n, unsigned workers) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (n > max_n || n > 6) {
    throw Error(ErrorCode::TooLargeToEnumerate,
                "enumerating 2^" + std::to_string(n * n) + " images exceeds the cap n <= " +
                    std::to_string(std::min(max_n, 6)));
  }
  const std::uint64_t total = std::uint64_t{1} << (n * n);
  constexpr std::size_t kChunks = 64;
  std::vector<DualityReport> parts(kChunks);
  parallel_chunks(total, kChunks, workers, [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
    auto& part = parts[c];
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const Image img = Image::from_mask(n, mask);
      const bool blr = crosses(img, kBlackLeftRight);
      const bool wtb = crosses(img, kWhiteTopBottom);
      ++part.total;
      part.blr_count += blr ? 1 : 0;
      part.violations += blr == wtb ? 1 : 0;
    }
  });
  DualityReport report;
  for (const auto& part : parts) {
    report.total += part.total;
    report.violations += part.violations;
    report.blr_count += part.blr_count;
  }
  return report;
}

}  // namespace zolab
