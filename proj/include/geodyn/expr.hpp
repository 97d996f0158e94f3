#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geodyn/errors.hpp"
#include "geodyn/jet.hpp"

namespace geodyn {

using ParamMap = std::map<std::string, double>;

// Built-in smooth functions available in expressions.
enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

const char* func_name(Func f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression AST. Variables are 1-based (x1..xn) to match the
// surface syntax. `Pow` keeps the integer exponent inline so derivatives
// stay smooth by construction.
struct Expr {
    enum class Kind { Number, Var, Param, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind;
    double number = 0.0;   // Number
    int var = 0;           // Var (1-based)
    std::string param;     // Param
    Func func = Func::Sin; // Call
    int exponent = 0;      // Pow
    ExprPtr a, b;          // children
};

// Construction helpers (used by the parser and by programmatic builders).
ExprPtr num(double v);
ExprPtr var(int i);
ExprPtr param(const std::string& name);
ExprPtr pi_const();
ExprPtr neg(ExprPtr e);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr ipow(ExprPtr a, int k);
ExprPtr call(Func f, ExprPtr arg);

// Grammar (EBNF):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' integer)?
//   unary  := '-'? atom
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
// ident resolves in order: variable x<k>, parameter, function name, pi.
ExprPtr parse(const std::string& src, int dim, const std::vector<std::string>& params);

// Canonical text form; parse(print(e), ...) reproduces e structurally.
std::string print(const Expr& e);
inline std::string print(const ExprPtr& e) { return print(*e); }

bool structurally_equal(const Expr& a, const Expr& b);

double eval(const Expr& e, std::span<const double> x, const ParamMap& bindings);
inline double eval(const ExprPtr& e, std::span<const double> x, const ParamMap& b) {
    return eval(*e, x, b);
}

// Value, gradient and Hessian at x, exact to roundoff.
Jet2 eval_jet2(const Expr& e, std::span<const double> x, const ParamMap& bindings);
inline Jet2 eval_jet2(const ExprPtr& e, std::span<const double> x, const ParamMap& b) {
    return eval_jet2(*e, x, b);
}

}  // namespace geodyn
