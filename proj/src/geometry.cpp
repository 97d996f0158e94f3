#include "geodyn/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace geodyn {

// VectorField ------------------------------------------------------------

Vec VectorField::value(const Vec& x) const {
    Vec out(dim);
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    for (int i = 0; i < dim; ++i) out(i) = eval(components[i], xs, params);
    return out;
}

void VectorField::jets(const Vec& x, Vec* val, Mat* jac) const {
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    if (val) val->resize(dim);
    if (jac) jac->resize(dim, dim);
    for (int i = 0; i < dim; ++i) {
        Jet2 j = eval_jet2(components[i], xs, params);
        if (val) (*val)(i) = j.value();
        if (jac) jac->row(i) = j.grad().transpose();
    }
}

Mat VectorField::jacobian(const Vec& x) const {
    Mat jac;
    jets(x, nullptr, &jac);
    return jac;
}

// MetricField -------------------------------------------------------------

MetricField MetricField::euclidean(int n) {
    return diagonal_constant(Vec::Ones(n));
}

MetricField MetricField::diagonal_constant(const Vec& diag) {
    MetricField m;
    m.dim = static_cast<int>(diag.size());
    m.entries.resize(static_cast<std::size_t>(m.dim) * m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j)
            m.entries[static_cast<std::size_t>(i) * m.dim + j] = num(i == j ? diag(i) : 0.0);
    m.sig_pos = static_cast<int>((diag.array() > 0).count());
    m.sig_neg = static_cast<int>((diag.array() < 0).count());
    m.constant = true;
    return m;
}

static void check_nondegenerate(const Mat& g) {
    const int n = static_cast<int>(g.rows());
    const double det = g.determinant();
    const double scale = std::max(1.0, std::pow(g.cwiseAbs().maxCoeff(), n));
    if (std::abs(det) < 1e-12 * scale) throw SingularMetric(det);
}

Mat MetricField::value(const Vec& x) const {
    Mat g(dim, dim);
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            g(i, j) = eval(entries[static_cast<std::size_t>(i) * dim + j], xs, params);
    check_nondegenerate(g);
    return g;
}

Mat MetricField::inverse(const Vec& x) const { return value(x).inverse(); }

void MetricField::jets(const Vec& x, Mat* g, Tensor3* dg) const {
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    if (g) g->resize(dim, dim);
    if (dg) dg->assign(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            Jet2 jet = eval_jet2(entries[static_cast<std::size_t>(i) * dim + j], xs, params);
            if (g) (*g)(i, j) = jet.value();
            if (dg)
                for (int k = 0; k < dim; ++k) (*dg)[static_cast<std::size_t>(k)](i, j) = jet.grad()(k);
        }
    if (g) check_nondegenerate(*g);
}

bool MetricField::signature_matches(const Vec& x) const {
    Eigen::SelfAdjointEigenSolver<Mat> es(value(x));
    int pos = 0, negc = 0;
    for (int i = 0; i < dim; ++i) {
        if (es.eigenvalues()(i) > 0)
            ++pos;
        else if (es.eigenvalues()(i) < 0)
            ++negc;
    }
    return pos == sig_pos && negc == sig_neg;
}

// Pointwise operations -----------------------------------------------------

const char* causality_name(Causality c) {
    switch (c) {
        case Causality::Timelike: return "timelike";
        case Causality::Causal: return "causal";
        case Causality::Null: return "null";
        case Causality::Spacelike: return "spacelike";
        case Causality::Mixed: return "mixed";
    }
    return "?";
}

double energy(const MetricField& g, const VectorField& X, const Vec& x) {
    Vec Xv = X.value(x);
    return 0.5 * Xv.dot(g.value(x) * Xv);
}

void energy_jet(const MetricField& g, const VectorField& X, const Vec& x, double* f, Vec* df) {
    const int n = g.dim;
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    // f assembled in jet arithmetic: derivatives come out of the generic
    // chain rule, independent of any hand-derived product-rule formula.
    std::vector<Jet2> Xj;
    Xj.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) Xj.push_back(eval_jet2(X.components[static_cast<std::size_t>(i)], xs, X.params));
    Jet2 acc = Jet2::constant(0.0, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet2 gij = eval_jet2(g.entries[static_cast<std::size_t>(i) * n + j], xs, g.params);
            acc = acc + gij * Xj[static_cast<std::size_t>(i)] * Xj[static_cast<std::size_t>(j)];
        }
    acc = 0.5 * acc;
    if (f) *f = acc.value();
    if (df) *df = acc.grad();
}

Causality classify(const MetricField& g, const VectorField& X, const std::vector<Vec>& sample) {
    if (sample.empty()) throw EmptySample();
    constexpr double zero_band = 1e-12;
    bool any_neg = false, any_zero = false, any_pos = false;
    for (const Vec& x : sample) {
        const double f = energy(g, X, x);
        if (f < -zero_band)
            any_neg = true;
        else if (f > zero_band)
            any_pos = true;
        else
            any_zero = true;
    }
    if (any_neg && any_pos) return Causality::Mixed;
    if (any_neg) return any_zero ? Causality::Causal : Causality::Timelike;
    if (any_pos) return Causality::Spacelike;
    return Causality::Null;
}

ChristoffelAt christoffel(const MetricField& g, const Vec& x) {
    const int n = g.dim;
    Mat gm;
    Tensor3 dg;
    g.jets(x, &gm, &dg);
    Mat ginv = gm.inverse();
    ChristoffelAt out;
    out.x = x;
    out.gamma.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int h = 0; h < n; ++h)
                    s += ginv(i, h) * (dg[static_cast<std::size_t>(j)](h, k) +
                                       dg[static_cast<std::size_t>(k)](h, j) -
                                       dg[static_cast<std::size_t>(h)](j, k));
                out.gamma[static_cast<std::size_t>(i)](j, k) = 0.5 * s;
            }
    return out;
}

Mat nabla_X(const MetricField& g, const VectorField& X, const Vec& x) {
    const int n = g.dim;
    Vec Xv;
    Mat Xj;
    X.jets(x, &Xv, &Xj);
    Mat out = Xj;
    if (!g.constant) {
        ChristoffelAt c = christoffel(g, x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) += c.gamma[static_cast<std::size_t>(i)].row(j).dot(Xv.transpose());
    }
    return out;
}

Mat adjoint_part(const MetricField& g, const VectorField& X, const Vec& x) {
    Mat gm = g.value(x);
    Mat nx = nabla_X(g, X, x);
    // A^i_j = g^{ih} g_{kj} (∇X)^k_h  = (g⁻¹ (∇X)ᵀ g)^i_j
    return gm.inverse() * nx.transpose() * gm;
}

HelicityAt helicity(const MetricField& g, const VectorField& X, const Vec& x) {
    HelicityAt out;
    out.x = x;
    Mat nx = nabla_X(g, X, x);
    Mat gm = g.value(x);
    out.F = nx - gm.inverse() * nx.transpose() * gm;
    out.omega = gm * out.F;
    return out;
}

Vec grad_f(const MetricField& g, const VectorField& X, const Vec& x) {
    double f;
    Vec df;
    energy_jet(g, X, x, &f, &df);
    return g.inverse(x) * df;
}

std::pair<double, double> finsler_diagnostics(const MetricField& g, const VectorField& X,
                                              const Vec& x, const Vec& v) {
    Mat gm = g.value(x);
    return {v.dot(gm * v), X.value(x).dot(gm * v)};
}

// JacobiStructure -----------------------------------------------------------

static MetricField build_conformal_grid(const MetricField& g, const VectorField& X, double H0) {
    const int n = g.dim;
    // f = ½ Σ g_ij X^i X^j as an expression, sharing parameter bindings.
    ExprPtr f_expr;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            ExprPtr term = mul(g.entries[static_cast<std::size_t>(i) * n + j],
                               mul(X.components[static_cast<std::size_t>(i)],
                                   X.components[static_cast<std::size_t>(j)]));
            f_expr = f_expr ? add(f_expr, term) : term;
        }
    ExprPtr phi = add(num(H0), mul(num(0.5), f_expr));

    MetricField out;
    out.dim = n;
    out.sig_pos = g.sig_pos;
    out.sig_neg = g.sig_neg;
    out.constant = false;
    out.params = g.params;
    out.params.insert(X.params.begin(), X.params.end());
    out.entries.resize(static_cast<std::size_t>(n) * n);
    for (std::size_t e = 0; e < out.entries.size(); ++e)
        out.entries[e] = mul(phi, g.entries[e]);
    return out;
}

JacobiStructure::JacobiStructure(MetricField g, VectorField X, double H0)
    : g_(std::move(g)), X_(std::move(X)), H0_(H0), gbar_(build_conformal_grid(g_, X_, H0)) {}

double JacobiStructure::conformal_factor(const Vec& x) const {
    const double phi = H0_ + energy(g_, X_, x);
    if (std::abs(phi) < kDegeneracyBand) throw DegenerateConformalFactor(phi);
    return phi;
}

Mat JacobiStructure::metric(const Vec& x) const { return conformal_factor(x) * g_.value(x); }

ChristoffelAt JacobiStructure::christoffel(const Vec& x) const {
    const int n = g_.dim;
    const double phi = conformal_factor(x);
    double f;
    Vec dphi;
    energy_jet(g_, X_, x, &f, &dphi);  // ∂φ = ∂f since H0 is constant
    Mat gm = g_.value(x);
    Vec gradphi = gm.inverse() * dphi;
    ChristoffelAt out = geodyn::christoffel(g_, x);
    out.x = x;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double corr = 0.0;
                if (i == j) corr += dphi(k);
                if (i == k) corr += dphi(j);
                corr -= gm(j, k) * gradphi(i);
                out.gamma[static_cast<std::size_t>(i)](j, k) += 0.5 / phi * corr;
            }
    return out;
}

Mat JacobiStructure::nonlinear_connection(const Vec& x, const Vec& y) const {
    const int n = g_.dim;
    ChristoffelAt c = geodyn::christoffel(g_, x);
    HelicityAt h = geodyn::helicity(g_, X_, x);
    Mat N(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            N(i, j) = c.gamma[static_cast<std::size_t>(i)].row(j).dot(y.transpose()) - h.F(i, j);
    return N;
}

}  // namespace geodyn
