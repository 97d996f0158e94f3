#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace geodyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Second-order forward-mode jet: carries a value together with its
// gradient and Hessian with respect to n seed variables. Arithmetic
// propagates both derivative orders exactly (to roundoff).
class Jet2 {
  public:
    Jet2() : val_(0.0) {}

    static Jet2 constant(double v, int n) {
        Jet2 j;
        j.val_ = v;
        j.grad_ = Vec::Zero(n);
        j.hess_ = Mat::Zero(n, n);
        return j;
    }

    // Seed for the i-th coordinate (0-based).
    static Jet2 variable(double v, int i, int n) {
        Jet2 j = constant(v, n);
        j.grad_(i) = 1.0;
        return j;
    }

    double value() const { return val_; }
    const Vec& grad() const { return grad_; }
    const Mat& hess() const { return hess_; }
    int dim() const { return static_cast<int>(grad_.size()); }

    Jet2 operator-() const {
        Jet2 r;
        r.val_ = -val_;
        r.grad_ = -grad_;
        r.hess_ = -hess_;
        return r;
    }

    friend Jet2 operator+(const Jet2& a, const Jet2& b) {
        Jet2 r;
        r.val_ = a.val_ + b.val_;
        r.grad_ = a.grad_ + b.grad_;
        r.hess_ = a.hess_ + b.hess_;
        return r;
    }
    friend Jet2 operator-(const Jet2& a, const Jet2& b) {
        Jet2 r;
        r.val_ = a.val_ - b.val_;
        r.grad_ = a.grad_ - b.grad_;
        r.hess_ = a.hess_ - b.hess_;
        return r;
    }
    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        Jet2 r;
        r.val_ = a.val_ * b.val_;
        r.grad_ = a.val_ * b.grad_ + b.val_ * a.grad_;
        // Outer products grouped so the Hessian stays bitwise symmetric.
        r.hess_ = a.val_ * b.hess_ + b.val_ * a.hess_ +
                  (a.grad_ * b.grad_.transpose() + b.grad_ * a.grad_.transpose()).eval();
        return r;
    }
    friend Jet2 operator/(const Jet2& a, const Jet2& b) {
        // From a = r*b: solve for r's derivatives order by order.
        Jet2 r;
        r.val_ = a.val_ / b.val_;
        r.grad_ = (a.grad_ - r.val_ * b.grad_) / b.val_;
        r.hess_ = (a.hess_ - r.val_ * b.hess_ -
                   (r.grad_ * b.grad_.transpose() + b.grad_ * r.grad_.transpose()).eval()) /
                  b.val_;
        return r;
    }

    friend Jet2 operator*(double c, const Jet2& a) {
        Jet2 r;
        r.val_ = c * a.val_;
        r.grad_ = c * a.grad_;
        r.hess_ = c * a.hess_;
        return r;
    }
    friend Jet2 operator*(const Jet2& a, double c) { return c * a; }

    // Smooth univariate composition: f(u) with f'(u), f''(u) supplied.
    static Jet2 compose(const Jet2& u, double f, double df, double ddf) {
        Jet2 r;
        r.val_ = f;
        r.grad_ = df * u.grad_;
        // ddf scales the outer product entrywise, keeping bitwise symmetry.
        r.hess_ = df * u.hess_ + ddf * (u.grad_ * u.grad_.transpose()).eval();
        return r;
    }

  private:
    double val_;
    Vec grad_;
    Mat hess_;
};

inline Jet2 sin(const Jet2& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    return Jet2::compose(u, s, c, -s);
}
inline Jet2 cos(const Jet2& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    return Jet2::compose(u, c, -s, -c);
}
inline Jet2 tan(const Jet2& u) {
    const double t = std::tan(u.value());
    const double sec2 = 1.0 + t * t;
    return Jet2::compose(u, t, sec2, 2.0 * t * sec2);
}
inline Jet2 exp(const Jet2& u) {
    const double e = std::exp(u.value());
    return Jet2::compose(u, e, e, e);
}
inline Jet2 log(const Jet2& u) {
    const double v = u.value();
    return Jet2::compose(u, std::log(v), 1.0 / v, -1.0 / (v * v));
}
inline Jet2 sqrt(const Jet2& u) {
    const double s = std::sqrt(u.value());
    return Jet2::compose(u, s, 0.5 / s, -0.25 / (s * s * s));
}
inline Jet2 abs(const Jet2& u) {
    const double sign = u.value() < 0.0 ? -1.0 : 1.0;
    return Jet2::compose(u, sign * u.value(), sign, 0.0);
}

// Integer power by the direct formula; exponent may be negative.
inline Jet2 pow(const Jet2& u, int k) {
    if (k == 0) return Jet2::constant(1.0, u.dim());
    const double v = u.value();
    const double f = std::pow(v, k);
    const double df = k * std::pow(v, k - 1);
    const double ddf = static_cast<double>(k) * (k - 1) * std::pow(v, k - 2);
    return Jet2::compose(u, f, df, ddf);
}

}  // namespace geodyn
