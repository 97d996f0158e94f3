#pragma once

#include <utility>
#include <vector>

#include "geodyn/expr.hpp"

namespace geodyn {

// Third-order array of Christoffel symbols: gamma[i](j,k) = Γ^i_{jk}.
using Tensor3 = std::vector<Mat>;

// Vector field with expression components and bound parameters.
struct VectorField {
    int dim = 0;
    std::vector<ExprPtr> components;
    ParamMap params;

    Vec value(const Vec& x) const;
    // J(i,j) = ∂_j X^i
    Mat jacobian(const Vec& x) const;
    void jets(const Vec& x, Vec* val, Mat* jac) const;
};

// Position-dependent symmetric (0,2) tensor with declared signature.
struct MetricField {
    int dim = 0;
    std::vector<ExprPtr> entries;  // row-major dim*dim, symmetric as written
    int sig_pos = 0;               // r in (r,s)
    int sig_neg = 0;               // s
    bool constant = false;
    ParamMap params;

    static MetricField euclidean(int n);
    static MetricField diagonal_constant(const Vec& diag);

    // Evaluated matrix; throws SingularMetric when degenerate.
    Mat value(const Vec& x) const;
    Mat inverse(const Vec& x) const;
    // dg[k](i,j) = ∂_k g_ij, from autodiff.
    void jets(const Vec& x, Mat* g, Tensor3* dg) const;
    // Eigenvalue signs at x must match the declared (r,s).
    bool signature_matches(const Vec& x) const;
};

struct ChristoffelAt {
    Vec x;
    Tensor3 gamma;
};

struct HelicityAt {
    Vec x;
    Mat F;      // mixed F_j{}^i stored as F(i,j)
    Mat omega;  // lowered 2-form ω_ij = g_ik F^k_j
};

enum class Causality { Timelike, Causal, Null, Spacelike, Mixed };
const char* causality_name(Causality c);

// f = ½ g(X,X)
double energy(const MetricField& g, const VectorField& X, const Vec& x);
// Value and gradient of f assembled from first-order jets of g and X.
void energy_jet(const MetricField& g, const VectorField& X, const Vec& x, double* f, Vec* df);

Causality classify(const MetricField& g, const VectorField& X, const std::vector<Vec>& sample);

ChristoffelAt christoffel(const MetricField& g, const Vec& x);

// (∇X)^i_j = ∂_j X^i + Γ^i_{jh} X^h
Mat nabla_X(const MetricField& g, const VectorField& X, const Vec& x);

// F^i_j = (∇X)^i_j − g^{ih} g_{kj} (∇X)^k_h, with ω = g∘F.
HelicityAt helicity(const MetricField& g, const VectorField& X, const Vec& x);

// g-adjoint part of ∇X: A^i_j = g^{ih} g_{kj} (∇X)^k_h, so ∇X = A + F.
Mat adjoint_part(const MetricField& g, const VectorField& X, const Vec& x);

// grad f = g^{ih} ∂_h f (autodiff route).
Vec grad_f(const MetricField& g, const VectorField& X, const Vec& x);

// (α², g(X,v)); the Finsler corollary's k is caller-supplied, so only the
// raw inner products are reported.
std::pair<double, double> finsler_diagnostics(const MetricField& g, const VectorField& X,
                                              const Vec& x, const Vec& v);

// Jacobi-type conformal rescaling ḡ = (H0 + f) g together with the
// nonlinear connection N_j{}^i = Γ^i_{jk} y^k − F_j{}^i. Immutable.
class JacobiStructure {
  public:
    JacobiStructure(MetricField g, VectorField X, double H0);

    // H0 + f(x); throws DegenerateConformalFactor inside the 1e-12 band.
    double conformal_factor(const Vec& x) const;
    Mat metric(const Vec& x) const;  // ḡ(x)
    // Γ̄ by the conformal-rescaling formula (the generic expression-grid
    // route is available via conformal_metric_field()).
    ChristoffelAt christoffel(const Vec& x) const;
    Mat nonlinear_connection(const Vec& x, const Vec& y) const;

    const MetricField& base_metric() const { return g_; }
    const VectorField& field() const { return X_; }
    double H0() const { return H0_; }
    // ḡ as an honest expression grid (independent computation path).
    const MetricField& conformal_metric_field() const { return gbar_; }

    static constexpr double kDegeneracyBand = 1e-12;

  private:
    MetricField g_;
    VectorField X_;
    double H0_;
    MetricField gbar_;
};

}  // namespace geodyn
