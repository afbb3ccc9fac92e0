#include "zolab/rng.hpp"

#include <thread>

#include "zolab/parallel.hpp"

namespace zolab {

Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

unsigned default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace zolab
