#include "zolab/formula.hpp"

#include <algorithm>

#include "zolab/error.hpp"

namespace zolab {

namespace fo {

namespace {

Formula atom(FormulaKind kind, std::string v, std::string w = {}) {
  Formula f;
  f.kind = kind;
  f.var = std::move(v);
  f.var2 = std::move(w);
  return f;
}

Formula binary(FormulaKind kind, Formula a, Formula b) {
  Formula f;
  f.kind = kind;
  f.children.push_back(std::move(a));
  f.children.push_back(std::move(b));
  return f;
}

Formula quantifier(FormulaKind kind, std::string v, Formula body) {
  Formula f;
  f.kind = kind;
  f.var = std::move(v);
  f.children.push_back(std::move(body));
  return f;
}

}  // namespace

Formula top() { return atom(FormulaKind::True, {}); }
Formula bottom() { return atom(FormulaKind::False, {}); }
Formula color(std::string v) { return atom(FormulaKind::Color, std::move(v)); }
Formula up(std::string v, std::string w) { return atom(FormulaKind::Up, std::move(v), std::move(w)); }
Formula right(std::string v, std::string w) {
  return atom(FormulaKind::Right, std::move(v), std::move(w));
}
Formula diag1(std::string v, std::string w) {
  return atom(FormulaKind::Diag1, std::move(v), std::move(w));
}
Formula diag2(std::string v, std::string w) {
  return atom(FormulaKind::Diag2, std::move(v), std::move(w));
}
Formula equal(std::string v, std::string w) {
  return atom(FormulaKind::Equal, std::move(v), std::move(w));
}
Formula dist_gt(std::string v, std::string w, int bound) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "dist> bound must be nonnegative");
  Formula f = atom(FormulaKind::DistGt, std::move(v), std::move(w));
  f.bound = bound;
  return f;
}
Formula negate(Formula f) {
  Formula out;
  out.kind = FormulaKind::Not;
  out.children.push_back(std::move(f));
  return out;
}
Formula conj(Formula a, Formula b) { return binary(FormulaKind::And, std::move(a), std::move(b)); }
Formula disj(Formula a, Formula b) { return binary(FormulaKind::Or, std::move(a), std::move(b)); }
Formula implies(Formula a, Formula b) {
  return binary(FormulaKind::Implies, std::move(a), std::move(b));
}
Formula iff(Formula a, Formula b) { return binary(FormulaKind::Iff, std::move(a), std::move(b)); }
Formula forall(std::string v, Formula body) {
  return quantifier(FormulaKind::Forall, std::move(v), std::move(body));
}
Formula exists(std::string v, Formula body) {
  return quantifier(FormulaKind::Exists, std::move(v), std::move(body));
}

}  // namespace fo

bool is_atom(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Color:
    case FormulaKind::Up:
    case FormulaKind::Right:
    case FormulaKind::Diag1:
    case FormulaKind::Diag2:
    case FormulaKind::Equal:
    case FormulaKind::DistGt:
      return true;
    default:
      return false;
  }
}

bool is_quantifier(FormulaKind kind) {
  return kind == FormulaKind::Forall || kind == FormulaKind::Exists;
}

namespace {

// Binding strength used by the printer.
int precedence(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return 0;
    case FormulaKind::Iff:
      return 1;
    case FormulaKind::Implies:
      return 2;
    case FormulaKind::Or:
      return 3;
    case FormulaKind::And:
      return 4;
    case FormulaKind::Not:
      return 5;
    default:
      return 6;
  }
}

bool right_associative(FormulaKind kind) {
  return kind == FormulaKind::Implies || kind == FormulaKind::Iff;
}

const char* binary_symbol(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::And: return " & ";
    case FormulaKind::Or: return " | ";
    case FormulaKind::Implies: return " -> ";
    case FormulaKind::Iff: return " <-> ";
    default: return "?";
  }
}

void print(const Formula& f, std::string& out);

void print_operand(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print(f, out);
  if (parens) out += ')';
}

void print(const Formula& f, std::string& out) {
  switch (f.kind) {
    case FormulaKind::True: out += "true"; return;
    case FormulaKind::False: out += "false"; return;
    case FormulaKind::Color: out += "C(" + f.var + ")"; return;
    case FormulaKind::Up: out += "U(" + f.var + "," + f.var2 + ")"; return;
    case FormulaKind::Right: out += "R(" + f.var + "," + f.var2 + ")"; return;
    case FormulaKind::Diag1: out += "D1(" + f.var + "," + f.var2 + ")"; return;
    case FormulaKind::Diag2: out += "D2(" + f.var + "," + f.var2 + ")"; return;
    case FormulaKind::Equal: out += f.var + " = " + f.var2; return;
    case FormulaKind::DistGt:
      out += "dist>(" + f.var + "," + f.var2 + "," + std::to_string(f.bound) + ")";
      return;
    case FormulaKind::Not:
      out += '~';
      print_operand(f.children[0], precedence(f.children[0].kind) < precedence(FormulaKind::Not),
                    out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff: {
      const int p = precedence(f.kind);
      const bool right_assoc = right_associative(f.kind);
      const int lp = precedence(f.children[0].kind);
      const int rp = precedence(f.children[1].kind);
      // Quantifiers always get parentheses inside an operand.
      print_operand(f.children[0], lp < p || (lp == p && right_assoc), out);
      out += binary_symbol(f.kind);
      print_operand(f.children[1], rp < p || (rp == p && !right_assoc), out);
      return;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out += f.kind == FormulaKind::Forall ? "forall " : "exists ";
      out += f.var;
      out += ". ";
      print(f.children[0], out);
      return;
  }
}

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  auto use = [&](const std::string& v) {
    if (!bound.contains(v)) out.insert(v);
  };
  if (is_atom(f.kind)) {
    if (!f.var.empty()) use(f.var);
    if (!f.var2.empty()) use(f.var2);
    return;
  }
  if (is_quantifier(f.kind)) {
    const bool inserted = bound.insert(f.var).second;
    collect_free(f.children[0], bound, out);
    if (inserted) bound.erase(f.var);
    return;
  }
  for (const auto& c : f.children) collect_free(c, bound, out);
}

void check(const Formula& f, std::set<std::string>& scope, const std::set<std::string>& allowed) {
  auto use = [&](const std::string& v) {
    if (!scope.contains(v) && !allowed.contains(v)) {
      throw Error(ErrorCode::UnboundVariable, "variable '" + v + "' is not bound");
    }
  };
  if (is_atom(f.kind)) {
    if (!f.var.empty()) use(f.var);
    if (!f.var2.empty()) use(f.var2);
    return;
  }
  if (is_quantifier(f.kind)) {
    if (scope.contains(f.var) || allowed.contains(f.var)) {
      throw Error(ErrorCode::ShadowedVariable, "variable '" + f.var + "' is bound twice");
    }
    scope.insert(f.var);
    check(f.children[0], scope, allowed);
    scope.erase(f.var);
    return;
  }
  for (const auto& c : f.children) check(c, scope, allowed);
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> all_variables(const Formula& f) {
  std::set<std::string> out;
  if (!f.var.empty()) out.insert(f.var);
  if (!f.var2.empty()) out.insert(f.var2);
  for (const auto& c : f.children) out.merge(all_variables(c));
  return out;
}

int quantifier_depth(const Formula& f) {
  int deepest = 0;
  for (const auto& c : f.children) deepest = std::max(deepest, quantifier_depth(c));
  return deepest + (is_quantifier(f.kind) ? 1 : 0);
}

void check_well_formed(const Formula& f, const std::set<std::string>& allowed_free) {
  std::set<std::string> scope;
  check(f, scope, allowed_free);
}

Formula rename_free(const Formula& f, const std::string& from, const std::string& to) {
  if (is_quantifier(f.kind) && f.var == from) return f;
  Formula out = f;
  if (is_atom(f.kind)) {
    if (out.var == from) out.var = to;
    if (out.var2 == from) out.var2 = to;
    return out;
  }
  for (auto& c : out.children) c = rename_free(c, from, to);
  return out;
}

Formula color_swap(const Formula& f) {
  if (f.kind == FormulaKind::Color) return fo::negate(f);
  Formula out = f;
  for (auto& c : out.children) c = color_swap(c);
  return out;
}

Formula relativize(const Formula& f, const std::string& center, int r) {
  if (is_atom(f.kind)) return f;
  Formula out = f;
  for (auto& c : out.children) c = relativize(c, center, r);
  if (f.kind == FormulaKind::Exists) {
    out.children[0] =
        fo::conj(fo::negate(fo::dist_gt(center, f.var, r)), std::move(out.children[0]));
  } else if (f.kind == FormulaKind::Forall) {
    out.children[0] = fo::disj(fo::dist_gt(center, f.var, r), std::move(out.children[0]));
  }
  return out;
}

}  // namespace zolab
