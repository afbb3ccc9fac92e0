#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zolab/formula.hpp"
#include "zolab/image.hpp"

namespace zolab {

using Assignment = std::map<std::string, Pixel>;

struct EvalOptions {
  // Upper bound on visited formula nodes per evaluation; WorkBudgetExceeded
  // past it. Brute force costs O(n^(2q)) for q nested quantifiers.
  std::uint64_t work_budget = 200'000'000;
};

// Formula lowered to a flat node table with numbered variable slots, reusable
// across many images.
class CompiledFormula {
 public:
  explicit CompiledFormula(const Formula& f);

  // Free variables in slot order; evaluation takes their values in this order.
  const std::vector<std::string>& free_variables() const noexcept { return free_; }

  // Tarskian semantics on the torus image. Quantifiers range over `domain`
  // (row-major pixel indices) when given, otherwise over all n^2 pixels.
  // Relations are always decided by torus arithmetic.
  bool evaluate(const Image& img, std::span<const std::int64_t> free_values,
                const std::vector<std::int64_t>* domain = nullptr,
                const EvalOptions& options = {}) const;

  // Semantics on a plain (non-wrapping) side x side grid whose colors are the
  // low side*side bits of `colors`, row-major. The universe is the grid.
  bool evaluate_plain(int side, std::uint64_t colors, std::span<const int> free_values,
                      const EvalOptions& options = {}) const;

  struct Node {
    FormulaKind kind;
    int a = -1;  // variable slot, or first child
    int b = -1;  // second variable slot, or second child
    int bound = 0;
    int slot = -1;  // quantified variable
  };

 private:
  int lower(const Formula& f, std::map<std::string, int>& scope);

  std::vector<Node> nodes_;
  std::vector<std::string> free_;
  int slots_ = 0;
  int root_ = -1;
};

// Evaluate f on img. Every free variable must appear in `assignment`
// (UnassignedFreeVariable otherwise). With a domain, assigned pixels must
// lie in it.
bool evaluate(const Image& img, const Formula& f, const Assignment& assignment = {},
              const std::optional<std::vector<Pixel>>& domain = std::nullopt,
              const EvalOptions& options = {});

}  // namespace zolab
