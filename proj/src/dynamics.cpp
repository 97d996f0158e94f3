#include "geodyn/dynamics.hpp"

#include <cmath>

namespace geodyn {

const char* system_kind_name(SystemKind k) {
    switch (k) {
        case SystemKind::Kinematic: return "kinematic";
        case SystemKind::Prolonged: return "prolonged";
        case SystemKind::Sys3: return "sys3";
        case SystemKind::Potential: return "potential";
        case SystemKind::GeometricDynamics: return "gd";
        case SystemKind::Sys4: return "sys4";
        case SystemKind::Sys5: return "sys5";
    }
    return "?";
}

std::optional<SystemKind> system_kind_from_name(const std::string& name) {
    for (SystemKind k : {SystemKind::Kinematic, SystemKind::Prolonged, SystemKind::Sys3,
                         SystemKind::Potential, SystemKind::GeometricDynamics, SystemKind::Sys4,
                         SystemKind::Sys5})
        if (name == system_kind_name(k)) return k;
    return std::nullopt;
}

void rhs(const DynSystem& sys, double /*t*/, const Vec& x, const Vec& v, Vec* dx, Vec* dv) {
    const int n = sys.g.dim;
    if (sys.kind == SystemKind::Kinematic) {
        *dx = sys.X.value(x);
        if (dv) dv->setZero(n);
        return;
    }

    if (sys.g.constant) {
        // Γ = 0 and ∇X is the plain Jacobian: everything follows from one
        // jet sweep of X. This is the hot path for the built-in flows.
        *dx = v;
        Mat gm = sys.g.value(x);
        Mat ginv = gm.inverse();
        Vec Xv;
        Mat J;
        sys.X.jets(x, &Xv, &J);
        Mat A = ginv * J.transpose() * gm;  // g-adjoint part of ∇X
        switch (sys.kind) {
            case SystemKind::Prolonged:
                *dv = J * v;
                if (sys.Y) *dv += sys.Y->jacobian(x) * v;
                break;
            case SystemKind::Sys3:
                *dv = A * Xv + (J - A) * v;
                break;
            case SystemKind::Potential:
                *dv = A * Xv;
                break;
            case SystemKind::GeometricDynamics: {
                // grad f by autodiff of f; Sys3 keeps the literal A(X)
                // assembly so the two routes stay independent.
                double f;
                Vec df;
                energy_jet(sys.g, sys.X, x, &f, &df);
                *dv = ginv * df + (J - A) * v;
                break;
            }
            case SystemKind::Sys4:
                *dv = A * v + (J - A) * Xv;
                break;
            case SystemKind::Sys5:
                *dv = A * Xv + (J - A) * Xv;
                break;
            default:
                break;
        }
        return;
    }

    *dx = v;
    Vec acc = Vec::Zero(n);

    // −Γ^i_{jk} v^j v^k : covariant-to-coordinate acceleration conversion.
    if (!sys.g.constant) {
        ChristoffelAt c = christoffel(sys.g, x);
        for (int i = 0; i < n; ++i) acc(i) -= v.dot(c.gamma[static_cast<std::size_t>(i)] * v);
    }

    switch (sys.kind) {
        case SystemKind::Prolonged: {
            acc += nabla_X(sys.g, sys.X, x) * v;
            if (sys.Y) acc += nabla_X(sys.g, *sys.Y, x) * v;
            break;
        }
        case SystemKind::Sys3: {
            acc += adjoint_part(sys.g, sys.X, x) * sys.X.value(x);
            acc += helicity(sys.g, sys.X, x).F * v;
            break;
        }
        case SystemKind::Potential:
            acc += grad_f(sys.g, sys.X, x);
            break;
        case SystemKind::GeometricDynamics:
            acc += grad_f(sys.g, sys.X, x);
            acc += helicity(sys.g, sys.X, x).F * v;
            break;
        case SystemKind::Sys4: {
            Vec Xv = sys.X.value(x);
            acc += adjoint_part(sys.g, sys.X, x) * v;
            acc += helicity(sys.g, sys.X, x).F * Xv;
            break;
        }
        case SystemKind::Sys5: {
            Vec Xv = sys.X.value(x);
            acc += grad_f(sys.g, sys.X, x);
            acc += helicity(sys.g, sys.X, x).F * Xv;
            break;
        }
        case SystemKind::Kinematic:
            break;  // handled above
    }
    *dv = acc;
}

double lagrangian(const DynSystem& sys, const Vec& x, const Vec& v) {
    Mat gm = sys.g.value(x);
    switch (sys.kind) {
        case SystemKind::Potential:
            return 0.5 * v.dot(gm * v) + energy(sys.g, sys.X, x);
        case SystemKind::GeometricDynamics: {
            Vec d = v - sys.X.value(x);
            return 0.5 * d.dot(gm * d);
        }
        default:
            throw UnsupportedSystem(std::string("no Lagrangian for system kind '") +
                                    system_kind_name(sys.kind) + "'");
    }
}

double hamiltonian(const MetricField& g, const VectorField& X, const Vec& x, const Vec& v) {
    return 0.5 * v.dot(g.value(x) * v) - energy(g, X, x);
}

double max_covariant_derivative(const MetricField& g, const VectorField& Y,
                                const std::vector<Vec>& points) {
    double worst = 0.0;
    for (const Vec& x : points) worst = std::max(worst, nabla_X(g, Y, x).cwiseAbs().maxCoeff());
    return worst;
}

DynSystem perturb_parallel(DynSystem sys, VectorField Y) {
    sys.kind = SystemKind::Prolonged;
    sys.Y = std::move(Y);
    return sys;
}

// Integration ---------------------------------------------------------------

namespace {

constexpr double kDtMin = 1e-12;

// Dormand–Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

template <class F>
void rk4_drive(F&& deriv, Vec& y, double t0, double t1, double dt, long max_steps,
               const std::function<void(double, const Vec&)>& emit, long* accepted) {
    double t = t0;
    emit(t, y);
    while (t < t1) {
        // absorb the remainder into the last step (at most 1.5*dt) so the
        // sample grid never ends in a degenerate micro-step
        double h = (t1 - t < 1.5 * dt) ? (t1 - t) : dt;
        Vec k1 = deriv(t, y);
        Vec k2 = deriv(t + h / 2, y + h / 2 * k1);
        Vec k3 = deriv(t + h / 2, y + h / 2 * k2);
        Vec k4 = deriv(t + h, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
        if (!y.allFinite()) throw NonFiniteState(t);
        ++*accepted;
        emit(t, y);
        if (*accepted > max_steps) throw Error("step budget exhausted");
    }
}

template <class F>
void dopri_drive(F&& deriv, Vec& y, double t0, double t1, double rtol, double atol,
                 long max_steps, const std::function<void(double, const Vec&)>& emit,
                 long* accepted, long* rejected) {
    double t = t0;
    emit(t, y);
    double h = std::min(1e-3, t1 - t0);
    Vec k1 = deriv(t, y);
    long steps = 0;
    while (t < t1) {
        if (++steps > max_steps) throw Error("step budget exhausted");
        h = std::min(h, t1 - t);
        if (h < kDtMin) throw StepSizeUnderflow(t, h);

        Vec k2 = deriv(t + c2 * h, y + h * (a21 * k1));
        Vec k3 = deriv(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        Vec k4 = deriv(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Vec k5 = deriv(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vec k6 = deriv(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vec ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vec k7 = deriv(t + h, ynew);

        Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double norm = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            norm += std::pow(err(i) / sc, 2);
        }
        norm = std::sqrt(norm / static_cast<double>(y.size()));

        if (norm <= 1.0 && ynew.allFinite()) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++*accepted;
            emit(t, y);
        } else {
            if (!ynew.allFinite()) throw NonFiniteState(t + h);
            ++*rejected;
        }
        double factor = norm > 0 ? 0.9 * std::pow(norm, -0.2) : 10.0;
        h *= std::clamp(factor, 0.2, 10.0);
    }
}

}  // namespace

std::pair<Trajectory, EnergyRecord> integrate(const DynSystem& sys, const Vec& x0, const Vec& v0,
                                              double t0, double t1, const IntegratorSpec& spec) {
    if (!(t1 > t0)) throw Error("integrate: t1 must exceed t0");
    const int n = sys.g.dim;
    const bool kinematic = sys.kind == SystemKind::Kinematic;

    Trajectory traj;
    EnergyRecord rec;
    traj.integrator = spec.method == IntegratorSpec::Method::RK4 ? "rk4" : "dopri45";
    traj.dt = spec.dt;
    traj.rtol = spec.rtol;
    traj.atol = spec.atol;

    auto emit = std::function<void(double, const Vec&)>([&](double t, const Vec& y) {
        Vec x = y.head(n);
        Vec v = kinematic ? sys.X.value(x) : Vec(y.tail(n));
        traj.t.push_back(t);
        traj.x.push_back(x);
        traj.v.push_back(v);
        rec.H.push_back(hamiltonian(sys.g, sys.X, x, v));
        rec.f.push_back(energy(sys.g, sys.X, x));
        if (!kinematic) {
            Mat gm = sys.g.value(x);
            rec.L_potential.push_back(0.5 * v.dot(gm * v) + rec.f.back());
            Vec d = v - sys.X.value(x);
            rec.L_gd.push_back(0.5 * d.dot(gm * d));
        }
    });

    Vec y;
    std::function<Vec(double, const Vec&)> deriv;
    if (kinematic) {
        y = x0;
        deriv = [&](double t, const Vec& yy) {
            Vec dx, dv;
            rhs(sys, t, yy, Vec(), &dx, nullptr);
            return dx;
        };
    } else {
        if (v0.size() != n) throw Error("integrate: v0 required for second-order systems");
        y.resize(2 * n);
        y << x0, v0;
        deriv = [&](double t, const Vec& yy) {
            Vec dx, dv;
            rhs(sys, t, yy.head(n), yy.tail(n), &dx, &dv);
            Vec out(2 * n);
            out << dx, dv;
            return out;
        };
    }

    if (spec.method == IntegratorSpec::Method::RK4) {
        if (!(spec.dt > 0)) throw Error("integrate: rk4 requires dt > 0");
        rk4_drive(deriv, y, t0, t1, spec.dt, spec.max_steps, emit, &traj.accepted);
    } else {
        if (!(spec.rtol > 0) || !(spec.atol > 0))
            throw Error("integrate: dopri45 requires positive tolerances");
        dopri_drive(deriv, y, t0, t1, spec.rtol, spec.atol, spec.max_steps, emit,
                    &traj.accepted, &traj.rejected);
    }

    if (sys.kind == SystemKind::Prolonged && sys.Y) {
        double worst = max_covariant_derivative(sys.g, *sys.Y, traj.x);
        if (worst > 1e-8)
            traj.warnings.push_back("NonParallelWarning: max |∇Y| = " + std::to_string(worst));
    }
    return {std::move(traj), std::move(rec)};
}

}  // namespace geodyn
