#include "geodyn/flows.hpp"

#include <cmath>

namespace geodyn {

namespace {

VectorField make_field(int dim, const std::vector<std::string>& comps,
                       const std::vector<std::string>& param_names, const ParamMap& params) {
    VectorField X;
    X.dim = dim;
    X.params = params;
    for (const auto& src : comps) X.components.push_back(parse(src, dim, param_names));
    return X;
}

double get(const ParamMap& overrides, const char* name, double fallback) {
    auto it = overrides.find(name);
    return it == overrides.end() ? fallback : it->second;
}

}  // namespace

FlowSpec pendulum() {
    FlowSpec s;
    s.name = "pendulum";
    s.dim = 2;
    s.metric = MetricField::euclidean(2);
    s.X = make_field(2, {"-x2", "x1"}, {}, {});
    s.curl = {num(0), num(0), num(2)};
    s.divergence = num(0);
    s.energy_formula = parse("(x1^2 + x2^2)/2", 2, {});
    s.equilibria = {Vec::Zero(2)};
    s.notes = "area preserving (div X = 0)";

    SolutionFamily kin;
    kin.system = SystemKind::Kinematic;
    kin.ncoef = 2;
    kin.description = "circles about the origin";
    kin.position = [](double t, const Vec& c) {
        Vec x(2);
        x << c(0) * std::cos(t) + c(1) * std::sin(t), c(0) * std::sin(t) - c(1) * std::cos(t);
        return x;
    };
    kin.velocity = [](double t, const Vec& c) {
        Vec v(2);
        v << -c(0) * std::sin(t) + c(1) * std::cos(t), c(0) * std::cos(t) + c(1) * std::sin(t);
        return v;
    };
    kin.acceleration = [](double t, const Vec& c) {
        Vec a(2);
        a << -c(0) * std::cos(t) - c(1) * std::sin(t), -c(0) * std::sin(t) + c(1) * std::cos(t);
        return a;
    };
    s.families.push_back(kin);

    SolutionFamily pro;
    pro.system = SystemKind::Prolonged;
    pro.ncoef = 4;  // (a1, a2, h, k)
    pro.description = "circles with free centre (h, k)";
    pro.position = [](double t, const Vec& c) {
        Vec x(2);
        x << c(0) * std::cos(t) + c(1) * std::sin(t) + c(2),
            c(0) * std::sin(t) - c(1) * std::cos(t) + c(3);
        return x;
    };
    pro.velocity = [](double t, const Vec& c) {
        Vec v(2);
        v << -c(0) * std::sin(t) + c(1) * std::cos(t), c(0) * std::cos(t) + c(1) * std::sin(t);
        return v;
    };
    pro.acceleration = [](double t, const Vec& c) {
        Vec a(2);
        a << -c(0) * std::cos(t) - c(1) * std::sin(t), -c(0) * std::sin(t) + c(1) * std::cos(t);
        return a;
    };
    s.families.push_back(pro);

    SolutionFamily gd;
    gd.system = SystemKind::GeometricDynamics;
    gd.ncoef = 4;  // (b1, b2, b3, b4)
    gd.description = "spirals b1 cos t + b2 sin t + b3 t cos t + b4 t sin t";
    gd.position = [](double t, const Vec& b) {
        const double c = std::cos(t), sn = std::sin(t);
        Vec x(2);
        x << b(0) * c + b(1) * sn + b(2) * t * c + b(3) * t * sn,
            b(0) * sn - b(1) * c + b(2) * t * sn - b(3) * t * c;
        return x;
    };
    gd.velocity = [](double t, const Vec& b) {
        const double c = std::cos(t), sn = std::sin(t);
        Vec v(2);
        v << -b(0) * sn + b(1) * c + b(2) * (c - t * sn) + b(3) * (sn + t * c),
            b(0) * c + b(1) * sn + b(2) * (sn + t * c) - b(3) * (c - t * sn);
        return v;
    };
    gd.acceleration = [](double t, const Vec& b) {
        const double c = std::cos(t), sn = std::sin(t);
        Vec a(2);
        a << -b(0) * c - b(1) * sn + b(2) * (-2 * sn - t * c) + b(3) * (2 * c - t * sn),
            -b(0) * sn + b(1) * c + b(2) * (2 * c - t * sn) + b(3) * (2 * sn + t * c);
        return a;
    };
    s.families.push_back(gd);
    return s;
}

FlowSpec lorenz(double sigma, double r, double b) {
    FlowSpec s;
    s.name = "lorenz";
    s.dim = 3;
    s.metric = MetricField::euclidean(3);
    s.defaults = {{"sigma", sigma}, {"r", r}, {"b", b}};
    const std::vector<std::string> names{"sigma", "r", "b"};
    s.X = make_field(3, {"-sigma*x1 + sigma*x2", "-x1*x3 + r*x1 - x2", "x1*x2 - b*x3"}, names,
                     s.defaults);
    s.curl = {parse("2*x1", 3, names), parse("-x2", 3, names), parse("r - x3 - sigma", 3, names)};
    s.energy_formula = parse(
        "((-sigma*x1 + sigma*x2)^2 + (-x1*x3 + r*x1 - x2)^2 + (x1*x2 - b*x3)^2)/2", 3, names);

    s.equilibria = {Vec::Zero(3)};
    if (sigma != 0.0 && b * (r - 1.0) > 0.0) {
        const double w = std::sqrt(b * (r - 1.0));
        Vec p(3), m(3);
        p << w, w, r - 1.0;
        m << -w, -w, r - 1.0;
        s.equilibria.push_back(p);
        s.equilibria.push_back(m);
    }
    if (sigma - b - 1.0 != 0.0) s.chaos_threshold = sigma * (sigma + b + 3.0) / (sigma - b - 1.0);
    s.notes = "chaotic for r > sigma*(sigma+b+3)/(sigma-b-1)";
    return s;
}

FlowSpec abc(double A, double B, double C) {
    FlowSpec s;
    s.name = "abc";
    s.dim = 3;
    s.metric = MetricField::euclidean(3);
    s.defaults = {{"A", A}, {"B", B}, {"C", C}};
    const std::vector<std::string> names{"A", "B", "C"};
    s.X = make_field(
        3, {"A*sin(x3) + C*cos(x2)", "B*sin(x1) + A*cos(x3)", "C*sin(x2) + B*cos(x1)"}, names,
        s.defaults);
    s.curl = s.X.components;  // Beltrami: rot X = X
    s.divergence = num(0);
    // The stored formula's constant block is A+B+C, not the A^2+B^2+C^2 the
    // expansion of ½|X|² gives. The two coincide at the default A=B=C=1 and
    // differ only by a constant otherwise, so gradients — and hence the
    // assembled dynamics — are unaffected either way.
    s.energy_formula =
        parse("(A + B + C + 2*A*C*sin(x3)*cos(x2) + 2*B*A*sin(x1)*cos(x3)"
              " + 2*C*B*sin(x2)*cos(x1))/2",
              3, names);
    s.equilibrium_surface = [](const Vec& x) {
        return std::sin(x(0)) * std::sin(x(1)) * std::sin(x(2)) +
               std::cos(x(0)) * std::cos(x(1)) * std::cos(x(2));
    };
    s.notes = "volume preserving (solenoidal); equilibria lie on "
              "sin x1 sin x2 sin x3 + cos x1 cos x2 cos x3 = 0";
    if (A != 1.0 || B != 1.0 || C != 1.0)
        s.notes += "; stored energy formula's constant block is A+B+C (constant offset only)";
    return s;
}

FlowSpec builtin_flow(const std::string& name, const ParamMap& overrides) {
    if (name == "pendulum") return pendulum();
    if (name == "lorenz")
        return lorenz(get(overrides, "sigma", 10.0), get(overrides, "r", 28.0),
                      get(overrides, "b", 8.0 / 3.0));
    if (name == "abc")
        return abc(get(overrides, "A", 1.0), get(overrides, "B", 1.0),
                   get(overrides, "C", 1.0));
    throw Error("unknown flow '" + name + "' (built-ins: pendulum, lorenz, abc)");
}

std::vector<Vec> find_equilibria(const FlowSpec& spec, const std::vector<Vec>& seeds,
                                 int* dropped) {
    std::vector<Vec> found;
    int lost = 0;
    for (Vec x : seeds) {
        if (!x.allFinite()) {
            ++lost;
            continue;
        }
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            Vec Fx = spec.X.value(x);
            if (Fx.cwiseAbs().maxCoeff() < 1e-10) {
                converged = true;
                break;
            }
            Mat J = spec.X.jacobian(x);
            Eigen::FullPivLU<Mat> lu(J);
            if (!lu.isInvertible()) break;
            Vec step = lu.solve(-Fx);
            double lambda = 1.0;
            const double base = Fx.norm();
            while (lambda > 1e-4 && spec.X.value(x + lambda * step).norm() >
                                        (1.0 - 0.5 * lambda) * base)
                lambda *= 0.5;
            x += lambda * step;
        }
        if (!converged) {
            ++lost;
            continue;
        }
        bool duplicate = false;
        for (const Vec& p : found)
            if ((p - x).norm() < 1e-6) {
                duplicate = true;
                break;
            }
        if (!duplicate) found.push_back(x);
    }
    if (dropped) *dropped = lost;
    return found;
}

}  // namespace geodyn
