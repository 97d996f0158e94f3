#include <random>

#include "doctest.h"
#include "geodyn/flows.hpp"
#include "geodyn/geometry.hpp"

using namespace geodyn;

namespace {

Vec make_vec(std::initializer_list<double> v) {
    Vec r(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

VectorField parse_field(int dim, std::initializer_list<const char*> comps,
                        const ParamMap& params = {}) {
    VectorField X;
    X.dim = dim;
    X.params = params;
    std::vector<std::string> names;
    for (const auto& [k, v] : params) names.push_back(k);
    for (const char* c : comps) X.components.push_back(parse(c, dim, names));
    return X;
}

// Position-dependent diagonal metric used to exercise curved-space paths:
// g = diag(1 + x1^2, exp(x2)) on R^2, Riemannian everywhere.
MetricField curved_metric() {
    MetricField g;
    g.dim = 2;
    g.sig_pos = 2;
    g.sig_neg = 0;
    g.constant = false;
    g.entries = {parse("1 + x1^2", 2, {}), parse("0", 2, {}), parse("0", 2, {}),
                 parse("exp(x2)", 2, {})};
    return g;
}

// Lorentzian metric diag(-1, 1) for signature/causality cases.
MetricField minkowski2() {
    MetricField g = MetricField::diagonal_constant(make_vec({-1.0, 1.0}));
    return g;
}

// Central-difference Christoffels straight from the definition, as an
// independent check on the autodiff assembly.
Tensor3 christoffel_fd(const MetricField& g, const Vec& x, double h = 1e-6) {
    const int n = g.dim;
    Tensor3 dg(n, Mat(n, n));
    for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        dg[k] = (g.value(xp) - g.value(xm)) / (2 * h);
    }
    const Mat ginv = g.inverse(x);
    Tensor3 gamma(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0;
                for (int h2 = 0; h2 < n; ++h2)
                    s += 0.5 * ginv(i, h2) * (dg[j](h2, k) + dg[k](h2, j) - dg[h2](j, k));
                gamma[i](j, k) = s;
            }
    return gamma;
}

}  // namespace

TEST_CASE("energy and classification") {
    FlowSpec p = pendulum();
    Vec x = make_vec({3.0, 4.0});
    CHECK(energy(p.metric, p.X, x) == doctest::Approx(12.5).epsilon(1e-14));

    // spacelike everywhere away from the origin under the Euclidean metric
    CHECK(classify(p.metric, p.X, {x}) == Causality::Spacelike);
    CHECK(classify(p.metric, p.X, {Vec::Zero(2)}) == Causality::Null);

    // X = (1, 0) under diag(-1, 1) is timelike; mixed samples report Mixed
    VectorField T = parse_field(2, {"1", "0"});
    VectorField S = parse_field(2, {"0", "1"});
    MetricField m = minkowski2();
    CHECK(classify(m, T, {x}) == Causality::Timelike);
    CHECK(classify(m, S, {x}) == Causality::Spacelike);

    VectorField W = parse_field(2, {"x1", "x2"});
    CHECK(classify(m, W, {make_vec({2.0, 0.0}), make_vec({0.0, 2.0})}) == Causality::Mixed);
}

TEST_CASE("signature declarations are checked against eigenvalues") {
    MetricField m = minkowski2();
    CHECK(m.sig_pos == 1);
    CHECK(m.sig_neg == 1);
    CHECK(m.signature_matches(Vec::Zero(2)));

    MetricField e = MetricField::euclidean(3);
    CHECK(e.sig_pos == 3);
    CHECK(e.signature_matches(make_vec({1.0, -2.0, 0.5})));
}

TEST_CASE("degenerate metric throws") {
    MetricField g;
    g.dim = 2;
    g.sig_pos = 2;
    g.constant = false;
    g.entries = {parse("x1", 2, {}), parse("0", 2, {}), parse("0", 2, {}), parse("1", 2, {})};
    CHECK_THROWS_AS(g.value(Vec::Zero(2)), SingularMetric);
    CHECK(g.value(make_vec({2.0, 0.0}))(0, 0) == 2.0);
}

TEST_CASE("christoffel matches finite differences on a curved metric") {
    MetricField g = curved_metric();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x = make_vec({u(rng), u(rng)});
        ChristoffelAt c = christoffel(g, x);
        Tensor3 fd = christoffel_fd(g, x);
        for (int i = 0; i < 2; ++i) {
            CHECK((c.gamma[i] - fd[i]).cwiseAbs().maxCoeff() < 1e-7);
            // symmetry in the lower indices is exact
            CHECK(c.gamma[i](0, 1) == c.gamma[i](1, 0));
        }
    }

    // hand value: for g11 = 1 + x1^2, Γ^1_11 = x1 / (1 + x1^2)
    Vec x = make_vec({0.5, 0.0});
    ChristoffelAt c = christoffel(g, x);
    CHECK(c.gamma[0](0, 0) == doctest::Approx(0.5 / 1.25).epsilon(1e-12));
    // for g22 = exp(x2), Γ^2_22 = 1/2
    CHECK(c.gamma[1](1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("metric compatibility of the Levi-Civita assembly") {
    // ∂_k g_ij = Γ^h_{ki} g_hj + Γ^h_{kj} g_ih must hold to roundoff.
    MetricField g = curved_metric();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x = make_vec({u(rng), u(rng)});
        Mat gm;
        Tensor3 dg;
        g.jets(x, &gm, &dg);
        ChristoffelAt c = christoffel(g, x);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double rhs = 0;
                    for (int h = 0; h < 2; ++h)
                        rhs += c.gamma[h](k, i) * gm(h, j) + c.gamma[h](k, j) * gm(i, h);
                    CHECK(dg[k](i, j) == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
                }
    }
}

TEST_CASE("nabla_X hand values") {
    // Flat metric: ∇X is the plain Jacobian.
    FlowSpec l = lorenz();  // sigma=10, r=28, b=8/3
    Mat nx = nabla_X(l.metric, l.X, Vec::Zero(3));
    Mat expect(3, 3);
    expect << -10, 10, 0, 28, -1, 0, 0, 0, -8.0 / 3.0;
    CHECK((nx - expect).cwiseAbs().maxCoeff() < 1e-14);

    // Curved metric adds the Γ X terms; check against finite differences
    // of X plus the hand-assembled correction.
    MetricField g = curved_metric();
    VectorField X = parse_field(2, {"x2^2", "x1*x2"});
    Vec x = make_vec({0.4, -0.3});
    Mat nxc = nabla_X(g, X, x);
    Mat J = X.jacobian(x);
    ChristoffelAt c = christoffel(g, x);
    Vec Xv = X.value(x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double expect_ij = J(i, j);
            for (int h = 0; h < 2; ++h) expect_ij += c.gamma[i](j, h) * Xv(h);
            CHECK(nxc(i, j) == doctest::Approx(expect_ij).epsilon(1e-13));
        }
}

TEST_CASE("helicity of the pendulum flow") {
    FlowSpec p = pendulum();
    Vec x = make_vec({0.7, -0.2});
    HelicityAt h = helicity(p.metric, p.X, x);
    // antisymmetric part of the rotation generator: F^1_2 = -2, F^2_1 = 2
    CHECK(h.F(0, 1) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(h.F(1, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(h.F(0, 0) == doctest::Approx(0.0).scale(1.0));
    // lowered form equals F under the Euclidean metric and is antisymmetric
    CHECK((h.omega + h.omega.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(h.omega(0, 1) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("helicity reduces to the curl form on flat space") {
    // For g = delta, ω_ij = ∂_j X_i − ∂_i X_j; check against the Jacobian.
    FlowSpec l = lorenz();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vec x = make_vec({u(rng), u(rng), u(rng)});
        HelicityAt h = helicity(l.metric, l.X, x);
        Mat J = l.X.jacobian(x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(h.omega(i, j) ==
                      doctest::Approx(J(i, j) - J(j, i)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("nabla_X splits into adjoint and helicity parts") {
    MetricField g = curved_metric();
    VectorField X = parse_field(2, {"sin(x2)", "x1^2"});
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vec x = make_vec({u(rng), u(rng)});
        Mat nx = nabla_X(g, X, x);
        Mat A = adjoint_part(g, X, x);
        HelicityAt h = helicity(g, X, x);
        CHECK((nx - (A + h.F)).cwiseAbs().maxCoeff() < 1e-12);
        // A is the g-adjoint of ∇X: g(Av, w) = g(v, (∇X)w); ω = gF antisymmetric.
        Mat gm = g.value(x);
        CHECK((gm * A - nx.transpose() * gm).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((gm * h.F + (gm * h.F).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gradient identity: grad f equals the adjoint route applied to X") {
    // d(½g(X,X)) = g(∇X ·, X) means grad f = g⁻¹(∇X)ᵀ g X = A(X). The two
    // sides come from different code paths (autodiff of f vs adjoint_part).
    MetricField g = curved_metric();
    VectorField X = parse_field(2, {"sin(x2) + x1", "x1*x2"});
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int trial = 0; trial < 25; ++trial) {
        Vec x = make_vec({u(rng), u(rng)});
        Vec lhs = grad_f(g, X, x);
        Vec rhs = adjoint_part(g, X, x) * X.value(x);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
    }

    FlowSpec l = lorenz();
    std::uniform_real_distribution<double> w(-8.0, 8.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vec x = make_vec({w(rng), w(rng), w(rng)});
        Vec lhs = grad_f(l.metric, l.X, x);
        Vec rhs = adjoint_part(l.metric, l.X, x) * l.X.value(x);
        double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-8);
    }
}

TEST_CASE("energy_jet gradient matches finite differences") {
    MetricField g = curved_metric();
    VectorField X = parse_field(2, {"exp(x1) - 1", "cos(x2)"});
    Vec x = make_vec({0.3, -0.6});
    double f0;
    Vec df;
    energy_jet(g, X, x, &f0, &df);
    CHECK(f0 == doctest::Approx(energy(g, X, x)).epsilon(1e-14));
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
        Vec xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        double fd = (energy(g, X, xp) - energy(g, X, xm)) / (2 * h);
        CHECK(df(k) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("finsler diagnostics report the raw inner products") {
    FlowSpec p = pendulum();
    Vec x = make_vec({1.0, 2.0});
    Vec v = make_vec({3.0, -1.0});
    auto [alpha2, gxv] = finsler_diagnostics(p.metric, p.X, x, v);
    CHECK(alpha2 == doctest::Approx(10.0).epsilon(1e-14));       // v·v
    CHECK(gxv == doctest::Approx(-2.0 * 3.0 + 1.0 * -1.0).epsilon(1e-14));  // X·v
}

TEST_CASE("Jacobi structure: conformal factor, metric and connection") {
    FlowSpec p = pendulum();
    const double H0 = 0.22;
    JacobiStructure js(p.metric, p.X, H0);

    Vec x = make_vec({1.0, 0.0});
    CHECK(js.conformal_factor(x) == doctest::Approx(H0 + 0.5).epsilon(1e-14));
    CHECK((js.metric(x) - (H0 + 0.5) * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    // conformal Christoffels: Γ̄^i_jk = ½φ⁻¹(δ^i_j ∂_k φ + δ^i_k ∂_j φ − δ_jk ∂_i φ)
    // with φ = H0 + (x1²+x2²)/2, so ∂φ = x.
    ChristoffelAt c = js.christoffel(x);
    const double phi = H0 + 0.5;
    CHECK(c.gamma[0](0, 0) == doctest::Approx(0.5 / phi).epsilon(1e-12));
    CHECK(c.gamma[0](1, 1) == doctest::Approx(-0.5 / phi).epsilon(1e-12));
    CHECK(c.gamma[1](0, 1) == doctest::Approx(0.5 / phi).epsilon(1e-12));
    CHECK(c.gamma[1](1, 0) == doctest::Approx(0.5 / phi).epsilon(1e-12));

    // flat base metric: the nonlinear connection collapses to −F
    Vec y = make_vec({0.0, 1.2});
    Mat N = js.nonlinear_connection(x, y);
    HelicityAt h = helicity(p.metric, p.X, x);
    CHECK((N + h.F).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Jacobi structure: dual route for the conformal Christoffels") {
    // The closed-form conformal rescaling must agree with the generic
    // Levi-Civita assembly run on the ḡ expression grid.
    FlowSpec p = pendulum();
    JacobiStructure js(p.metric, p.X, 0.35);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x = make_vec({u(rng), u(rng)});
        if (std::abs(js.conformal_factor(x)) < 1e-3) continue;
        ChristoffelAt direct = js.christoffel(x);
        ChristoffelAt generic = christoffel(js.conformal_metric_field(), x);
        for (int i = 0; i < 2; ++i)
            CHECK((direct.gamma[i] - generic.gamma[i]).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("Jacobi structure: degenerate conformal factor throws") {
    FlowSpec p = pendulum();
    // H0 = −½|x|² makes φ vanish on the circle |x|² = −2H0.
    JacobiStructure js(p.metric, p.X, -0.5);
    CHECK_THROWS_AS(js.conformal_factor(make_vec({1.0, 0.0})), DegenerateConformalFactor);
    CHECK_THROWS_AS(js.metric(make_vec({0.0, 1.0})), DegenerateConformalFactor);
    CHECK(js.conformal_factor(make_vec({2.0, 0.0})) == doctest::Approx(1.5).epsilon(1e-14));
}
