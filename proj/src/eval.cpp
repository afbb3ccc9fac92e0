#include "zolab/eval.hpp"

#include <algorithm>
#include <numeric>

#include "zolab/error.hpp"

namespace zolab {

namespace {

struct TorusStructure {
  const Image& img;
  int n;

  std::int64_t size() const { return std::int64_t{n} * n; }
  bool color(std::int64_t e) const { return img.get(e); }

  std::int64_t shift(std::int64_t e, int drow, int dcol) const {
    int row = static_cast<int>(e / n) + drow;
    int col = static_cast<int>(e % n) + dcol;
    row = row >= n ? row - n : (row < 0 ? row + n : row);
    col = col >= n ? col - n : (col < 0 ? col + n : col);
    return std::int64_t{row} * n + col;
  }
  bool step(std::int64_t from, std::int64_t to, int drow, int dcol) const {
    return shift(from, drow, dcol) == to;
  }
  int distance(std::int64_t a, std::int64_t b) const {
    auto circ = [this](int u, int v) {
      int d = u > v ? u - v : v - u;
      return std::min(d, n - d);
    };
    return std::max(circ(static_cast<int>(a / n), static_cast<int>(b / n)),
                    circ(static_cast<int>(a % n), static_cast<int>(b % n)));
  }
};

struct PlainStructure {
  int side;
  std::uint64_t colors;

  std::int64_t size() const { return std::int64_t{side} * side; }
  bool color(std::int64_t e) const { return (colors >> e) & 1U; }
  bool step(std::int64_t from, std::int64_t to, int drow, int dcol) const {
    const int row = static_cast<int>(from / side) + drow;
    const int col = static_cast<int>(from % side) + dcol;
    if (row < 0 || row >= side || col < 0 || col >= side) return false;
    return std::int64_t{row} * side + col == to;
  }
  int distance(std::int64_t a, std::int64_t b) const {
    const int dr = static_cast<int>(a / side - b / side);
    const int dc = static_cast<int>(a % side - b % side);
    return std::max(dr < 0 ? -dr : dr, dc < 0 ? -dc : dc);
  }
};

template <typename Structure>
class Interpreter {
 public:
  Interpreter(const std::vector<CompiledFormula::Node>& nodes, const Structure& s,
              std::vector<std::int64_t>& env, const std::vector<std::int64_t>* domain,
              std::uint64_t budget)
      : nodes_(nodes), s_(s), env_(env), domain_(domain), budget_(budget) {}

  bool run(int idx) {
    if (++work_ > budget_) {
      throw Error(ErrorCode::WorkBudgetExceeded,
                  "evaluation exceeded work budget of " + std::to_string(budget_) + " steps");
    }
    const auto& node = nodes_[static_cast<std::size_t>(idx)];
    switch (node.kind) {
      case FormulaKind::True: return true;
      case FormulaKind::False: return false;
      case FormulaKind::Color: return s_.color(env_[node.a]);
      case FormulaKind::Up: return s_.step(env_[node.a], env_[node.b], 0, 1);
      case FormulaKind::Right: return s_.step(env_[node.a], env_[node.b], 1, 0);
      case FormulaKind::Diag1: return s_.step(env_[node.a], env_[node.b], 1, 1);
      case FormulaKind::Diag2: return s_.step(env_[node.a], env_[node.b], 1, -1);
      case FormulaKind::Equal: return env_[node.a] == env_[node.b];
      case FormulaKind::DistGt: return s_.distance(env_[node.a], env_[node.b]) > node.bound;
      case FormulaKind::Not: return !run(node.a);
      case FormulaKind::And: return run(node.a) && run(node.b);
      case FormulaKind::Or: return run(node.a) || run(node.b);
      case FormulaKind::Implies: return !run(node.a) || run(node.b);
      case FormulaKind::Iff: return run(node.a) == run(node.b);
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        const bool universal = node.kind == FormulaKind::Forall;
        auto& slot = env_[static_cast<std::size_t>(node.slot)];
        const std::int64_t saved = slot;
        bool result = universal;
        auto visit = [&](std::int64_t e) {
          slot = e;
          return run(node.a) != universal;  // found witness / counterexample
        };
        if (domain_ != nullptr) {
          for (std::int64_t e : *domain_) {
            if (visit(e)) {
              result = !universal;
              break;
            }
          }
        } else {
          for (std::int64_t e = 0, end = s_.size(); e < end; ++e) {
            if (visit(e)) {
              result = !universal;
              break;
            }
          }
        }
        slot = saved;
        return result;
      }
    }
    return false;
  }

 private:
  const std::vector<CompiledFormula::Node>& nodes_;
  const Structure& s_;
  std::vector<std::int64_t>& env_;
  const std::vector<std::int64_t>* domain_;
  std::uint64_t budget_;
  std::uint64_t work_ = 0;
};

}  // namespace

CompiledFormula::CompiledFormula(const Formula& f) {
  for (const auto& v : zolab::free_variables(f)) free_.push_back(v);
  std::map<std::string, int> scope;
  for (const auto& v : free_) scope[v] = slots_++;
  root_ = lower(f, scope);
}

int CompiledFormula::lower(const Formula& f, std::map<std::string, int>& scope) {
  Node node{f.kind};
  if (is_atom(f.kind)) {
    if (!f.var.empty()) node.a = scope.at(f.var);
    if (!f.var2.empty()) node.b = scope.at(f.var2);
    node.bound = f.bound;
  } else if (is_quantifier(f.kind)) {
    node.slot = slots_++;
    auto previous = scope.find(f.var);
    std::optional<int> shadowed;
    if (previous != scope.end()) shadowed = previous->second;
    scope[f.var] = node.slot;
    node.a = lower(f.children[0], scope);
    if (shadowed) scope[f.var] = *shadowed;
    else scope.erase(f.var);
  } else {
    node.a = lower(f.children[0], scope);
    if (f.children.size() > 1) node.b = lower(f.children[1], scope);
  }
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

bool CompiledFormula::evaluate(const Image& img, std::span<const std::int64_t> free_values,
                               const std::vector<std::int64_t>* domain,
                               const EvalOptions& options) const {
  if (free_values.size() != free_.size()) {
    throw Error(ErrorCode::UnassignedFreeVariable, "wrong number of free variable values");
  }
  std::vector<std::int64_t> env(static_cast<std::size_t>(slots_), 0);
  std::copy(free_values.begin(), free_values.end(), env.begin());
  TorusStructure s{img, img.n()};
  return Interpreter<TorusStructure>(nodes_, s, env, domain, options.work_budget).run(root_);
}

bool CompiledFormula::evaluate_plain(int side, std::uint64_t colors,
                                     std::span<const int> free_values,
                                     const EvalOptions& options) const {
  if (free_values.size() != free_.size()) {
    throw Error(ErrorCode::UnassignedFreeVariable, "wrong number of free variable values");
  }
  std::vector<std::int64_t> env(static_cast<std::size_t>(slots_), 0);
  std::copy(free_values.begin(), free_values.end(), env.begin());
  PlainStructure s{side, colors};
  return Interpreter<PlainStructure>(nodes_, s, env, nullptr, options.work_budget).run(root_);
}

bool evaluate(const Image& img, const Formula& f, const Assignment& assignment,
              const std::optional<std::vector<Pixel>>& domain, const EvalOptions& options) {
  const CompiledFormula compiled(f);
  const TorusGeometry geom = img.geometry();
  std::vector<std::int64_t> values;
  for (const auto& v : compiled.free_variables()) {
    auto it = assignment.find(v);
    if (it == assignment.end()) {
      throw Error(ErrorCode::UnassignedFreeVariable, "free variable '" + v + "' is unassigned");
    }
    const Pixel x = it->second;
    if (x.row < 0 || x.row >= img.n() || x.col < 0 || x.col >= img.n()) {
      throw Error(ErrorCode::InvalidArgument, "pixel assigned to '" + v + "' is off the image");
    }
    values.push_back(geom.index(x));
  }
  if (!domain) return compiled.evaluate(img, values, nullptr, options);

  std::vector<std::int64_t> members;
  members.reserve(domain->size());
  for (const Pixel& x : *domain) members.push_back(geom.index(geom.wrap_add(x, {0, 0})));
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (std::int64_t v : values) {
    if (!std::binary_search(members.begin(), members.end(), v)) {
      throw Error(ErrorCode::InvalidArgument, "assigned pixel lies outside the domain");
    }
  }
  return compiled.evaluate(img, values, &members, options);
}

}  // namespace zolab
