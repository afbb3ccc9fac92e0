#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace zolab {

enum class FormulaKind {
  True,
  False,
  Color,    // C(v): v is black
  Up,       // U(v,w): w = v + (0,1)
  Right,    // R(v,w): w = v + (1,0)
  Diag1,    // D1(v,w): w = v + (1,1)
  Diag2,    // D2(v,w): w = v + (1,-1)
  Equal,    // v = w
  DistGt,   // dist>(v,w,K): graph distance exceeds K
  Not,
  And,
  Or,
  Implies,
  Iff,
  Forall,
  Exists,
};

// First-order formula over the vocabulary {C, U, R, D1, D2} with equality.
// Atoms use `var` (and `var2`); quantifiers bind `var` over children[0].
struct Formula {
  FormulaKind kind = FormulaKind::True;
  std::string var;
  std::string var2;
  int bound = 0;
  std::vector<Formula> children;

  bool operator==(const Formula&) const = default;
};

namespace fo {

Formula top();
Formula bottom();
Formula color(std::string v);
Formula up(std::string v, std::string w);
Formula right(std::string v, std::string w);
Formula diag1(std::string v, std::string w);
Formula diag2(std::string v, std::string w);
Formula equal(std::string v, std::string w);
Formula dist_gt(std::string v, std::string w, int bound);
Formula negate(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula forall(std::string v, Formula body);
Formula exists(std::string v, Formula body);

}  // namespace fo

bool is_atom(FormulaKind kind);
bool is_quantifier(FormulaKind kind);

// Grammar, loosest binding first:
//   formula    := ("forall" | "exists") var "." formula | iff
//   iff        := implies ("<->" iff)?          right-associative
//   implies    := or ("->" implies)?            right-associative
//   or         := and ("|" and)*
//   and        := unary ("&" unary)*
//   unary      := ("~" | "!" | "not" | "¬") unary | "(" formula ")" | atom
//   atom       := C(x) | U(x,y) | R(x,y) | D1(x,y) | D2(x,y) | x = y
//               | dist>(x,y,K) | true | false
// A quantifier inside an operand extends as far right as possible.
Formula parse(std::string_view text);

// Like parse, but drops `#` comments to end of line first.
Formula parse_formula_file(std::string_view text);

// Canonical text; parse(to_string(f)) == f.
std::string to_string(const Formula& f);

std::set<std::string> free_variables(const Formula& f);
std::set<std::string> all_variables(const Formula& f);
int quantifier_depth(const Formula& f);

// Throws UnboundVariable for a free variable outside `allowed_free` and
// ShadowedVariable when a quantifier rebinds a variable already in scope.
void check_well_formed(const Formula& f, const std::set<std::string>& allowed_free = {});

// Replaces free occurrences of `from` by `to`. `to` must not be bound in f.
Formula rename_free(const Formula& f, const std::string& from, const std::string& to);

// Black/white exchange: every C(v) becomes ~C(v).
Formula color_swap(const Formula& f);

// Confines every quantifier to the ball of radius r around `center`.
Formula relativize(const Formula& f, const std::string& center, int r);

}  // namespace zolab
