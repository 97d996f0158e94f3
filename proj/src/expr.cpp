#include "geodyn/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace geodyn {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
    }
    return "?";
}

static bool lookup_func(const std::string& name, Func* out) {
    static const std::pair<const char*, Func> table[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos},  {"tan", Func::Tan},
        {"exp", Func::Exp}, {"log", Func::Log},  {"sqrt", Func::Sqrt},
        {"abs", Func::Abs},
    };
    for (const auto& [n, f] : table) {
        if (name == n) {
            *out = f;
            return true;
        }
    }
    return false;
}

ExprPtr num(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Number;
    e->number = v;
    return e;
}
ExprPtr var(int i) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->var = i;
    return e;
}
ExprPtr param(const std::string& name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Param;
    e->param = name;
    return e;
}
ExprPtr pi_const() {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Pi;
    return e;
}
static ExprPtr binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
ExprPtr neg(ExprPtr x) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Neg;
    e->a = std::move(x);
    return e;
}
ExprPtr add(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Add, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Sub, std::move(a), std::move(b)); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Mul, std::move(a), std::move(b)); }
ExprPtr div(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Div, std::move(a), std::move(b)); }
ExprPtr ipow(ExprPtr a, int k) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Pow;
    e->a = std::move(a);
    e->exponent = k;
    return e;
}
ExprPtr call(Func f, ExprPtr arg) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Call;
    e->func = f;
    e->a = std::move(arg);
    return e;
}

// Parser ---------------------------------------------------------------

namespace {

class Parser {
  public:
    Parser(const std::string& src, int dim, const std::vector<std::string>& params)
        : src_(src), dim_(dim), params_(params) {}

    ExprPtr run() {
        if (src_.empty()) throw SyntaxError(0, "nonempty expression");
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) throw SyntaxError(pos_, "end of input");
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (accept('+'))
                e = add(e, term());
            else if (accept('-'))
                e = sub(e, term());
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = factor();
        for (;;) {
            if (accept('*'))
                e = mul(e, factor());
            else if (accept('/'))
                e = div(e, factor());
            else
                return e;
        }
    }

    ExprPtr factor() {
        ExprPtr e = unary();
        if (accept('^')) return ipow(e, integer());
        return e;
    }

    ExprPtr unary() {
        if (accept('-')) return neg(atom());
        return atom();
    }

    int integer() {
        skip_ws();
        std::size_t start = pos_;
        bool negative = false;
        if (pos_ < src_.size() && src_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        std::size_t digits = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ == digits) throw SyntaxError(start, "integer exponent");
        int v = std::atoi(src_.substr(digits, pos_ - digits).c_str());
        return negative ? -v : v;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "number, identifier or '('");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            if (!accept(')')) throw SyntaxError(pos_, "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw SyntaxError(pos_, "number, identifier or '('");
    }

    ExprPtr number() {
        std::size_t start = pos_;
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw SyntaxError(start, "number");
        pos_ += static_cast<std::size_t>(end - begin);
        return num(v);
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);

        // Resolution order: variable x<k>, parameter, function, pi.
        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            int k = std::atoi(name.c_str() + 1);
            if (k < 1 || k > dim_) throw IndexOutOfRange(start, k, dim_);
            return var(k);
        }
        for (const auto& p : params_)
            if (p == name) return param(name);
        Func f;
        if (lookup_func(name, &f)) {
            if (!accept('(')) throw SyntaxError(pos_, "'(' after function name");
            ExprPtr arg = expr();
            if (!accept(')')) throw SyntaxError(pos_, "')'");
            return call(f, arg);
        }
        if (name == "pi") return pi_const();
        throw UnknownIdentifier(start, name);
    }

    const std::string& src_;
    int dim_;
    const std::vector<std::string>& params_;
    std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse(const std::string& src, int dim, const std::vector<std::string>& params) {
    return Parser(src, dim, params).run();
}

// Printer --------------------------------------------------------------

namespace {

bool is_atom(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Number:
        case Expr::Kind::Var:
        case Expr::Kind::Param:
        case Expr::Kind::Pi:
        case Expr::Kind::Call:
            return true;
        default:
            return false;
    }
}

// Precedence: Add/Sub = 1, Mul/Div = 2, Pow = 3, Neg sits between.
int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
            return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div:
            return 2;
        case Expr::Kind::Neg:
            return 3;
        case Expr::Kind::Pow:
            return 4;
        default:
            return 5;
    }
}

void render(const Expr& e, std::string& out);

void render_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        render(child, out);
        out += ')';
    } else {
        render(child, out);
    }
}

void render(const Expr& e, std::string& out) {
    char buf[64];
    switch (e.kind) {
        case Expr::Kind::Number:
            std::snprintf(buf, sizeof buf, "%.17g", e.number);
            out += buf;
            break;
        case Expr::Kind::Var:
            out += 'x';
            out += std::to_string(e.var);
            break;
        case Expr::Kind::Param:
            out += e.param;
            break;
        case Expr::Kind::Pi:
            out += "pi";
            break;
        case Expr::Kind::Neg:
            out += '-';
            // Operand of unary minus must read back as an atom.
            if (is_atom(*e.a)) {
                render(*e.a, out);
            } else {
                out += '(';
                render(*e.a, out);
                out += ')';
            }
            break;
        case Expr::Kind::Add:
            render_child(*e.a, 1, out);
            out += '+';
            render_child(*e.b, 2, out);
            break;
        case Expr::Kind::Sub:
            render_child(*e.a, 1, out);
            out += '-';
            render_child(*e.b, 2, out);
            break;
        case Expr::Kind::Mul:
            render_child(*e.a, 2, out);
            out += '*';
            render_child(*e.b, 3, out);
            break;
        case Expr::Kind::Div:
            render_child(*e.a, 2, out);
            out += '/';
            render_child(*e.b, 3, out);
            break;
        case Expr::Kind::Pow:
            // Base must read back as a bare unary; '-x^2' reparses as (-x)^2,
            // which is exactly Pow(Neg(x), 2).
            if (is_atom(*e.a) || (e.a->kind == Expr::Kind::Neg && is_atom(*e.a->a))) {
                render(*e.a, out);
            } else {
                out += '(';
                render(*e.a, out);
                out += ')';
            }
            out += '^';
            out += std::to_string(e.exponent);
            break;
        case Expr::Kind::Call:
            out += func_name(e.func);
            out += '(';
            render(*e.a, out);
            out += ')';
            break;
    }
}

}  // namespace

std::string print(const Expr& e) {
    std::string out;
    render(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Number: return a.number == b.number;
        case Expr::Kind::Var: return a.var == b.var;
        case Expr::Kind::Param: return a.param == b.param;
        case Expr::Kind::Pi: return true;
        case Expr::Kind::Neg: return structurally_equal(*a.a, *b.a);
        case Expr::Kind::Pow:
            return a.exponent == b.exponent && structurally_equal(*a.a, *b.a);
        case Expr::Kind::Call:
            return a.func == b.func && structurally_equal(*a.a, *b.a);
        default:
            return structurally_equal(*a.a, *b.a) && structurally_equal(*a.b, *b.b);
    }
}

// Evaluator ------------------------------------------------------------

namespace {

inline double scalar_of(double v) { return v; }
inline double scalar_of(const Jet2& j) { return j.value(); }

template <class T>
T apply_func(Func f, const T& u, const Expr& node) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::tan;
    const double v = scalar_of(u);
    switch (f) {
        case Func::Sin: return sin(u);
        case Func::Cos: return cos(u);
        case Func::Tan: return tan(u);
        case Func::Exp: return exp(u);
        case Func::Log:
            if (v <= 0.0) throw DomainError("log of non-positive value", print(node));
            return log(u);
        case Func::Sqrt:
            if (v < 0.0) throw DomainError("sqrt of negative value", print(node));
            return sqrt(u);
        case Func::Abs: return abs(u);
    }
    throw Error("unreachable");
}

template <class T>
T ipow_val(const T& u, int k, const Expr& node);

template <>
double ipow_val<double>(const double& u, int k, const Expr& node) {
    if (k < 0 && u == 0.0) throw DomainError("zero base with negative exponent", print(node));
    return std::pow(u, k);
}
template <>
Jet2 ipow_val<Jet2>(const Jet2& u, int k, const Expr& node) {
    if (k < 0 && u.value() == 0.0)
        throw DomainError("zero base with negative exponent", print(node));
    return pow(u, k);
}

template <class T, class MakeConst, class VarAt>
T eval_rec(const Expr& e, const MakeConst& cnst, const VarAt& var_at, const ParamMap& params) {
    switch (e.kind) {
        case Expr::Kind::Number: return cnst(e.number);
        case Expr::Kind::Var: return var_at(e.var - 1);
        case Expr::Kind::Param: {
            auto it = params.find(e.param);
            if (it == params.end()) throw UnboundParameter(e.param);
            return cnst(it->second);
        }
        case Expr::Kind::Pi: return cnst(std::numbers::pi);
        case Expr::Kind::Neg: return -eval_rec<T>(*e.a, cnst, var_at, params);
        case Expr::Kind::Add:
            return eval_rec<T>(*e.a, cnst, var_at, params) +
                   eval_rec<T>(*e.b, cnst, var_at, params);
        case Expr::Kind::Sub:
            return eval_rec<T>(*e.a, cnst, var_at, params) -
                   eval_rec<T>(*e.b, cnst, var_at, params);
        case Expr::Kind::Mul:
            return eval_rec<T>(*e.a, cnst, var_at, params) *
                   eval_rec<T>(*e.b, cnst, var_at, params);
        case Expr::Kind::Div: {
            T a = eval_rec<T>(*e.a, cnst, var_at, params);
            T b = eval_rec<T>(*e.b, cnst, var_at, params);
            if (scalar_of(b) == 0.0) throw DomainError("division by zero", print(*e.b));
            return a / b;
        }
        case Expr::Kind::Pow:
            return ipow_val<T>(eval_rec<T>(*e.a, cnst, var_at, params), e.exponent, e);
        case Expr::Kind::Call:
            return apply_func<T>(e.func, eval_rec<T>(*e.a, cnst, var_at, params), e);
    }
    throw Error("unreachable");
}

}  // namespace

double eval(const Expr& e, std::span<const double> x, const ParamMap& bindings) {
    return eval_rec<double>(
        e, [](double v) { return v; }, [&](int i) { return x[i]; }, bindings);
}

Jet2 eval_jet2(const Expr& e, std::span<const double> x, const ParamMap& bindings) {
    const int n = static_cast<int>(x.size());
    return eval_rec<Jet2>(
        e, [n](double v) { return Jet2::constant(v, n); },
        [&](int i) { return Jet2::variable(x[i], i, n); }, bindings);
}

}  // namespace geodyn
