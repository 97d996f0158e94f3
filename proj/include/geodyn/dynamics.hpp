#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geodyn/geometry.hpp"

namespace geodyn {

// The second-order prolongations of a flow, plus the flow itself.
// Each kind names the assembly on the right-hand side:
//   Kinematic            ẋ = X
//   Prolonged            ∇ẋ/dt = (∇X)(ẋ)                    [+ (∇Y)(ẋ) if Y set]
//   Sys3                 ∇ẋ/dt = g⁻¹⊗g(∇X)(X) + F(ẋ)
//   Potential            ∇ẋ/dt = grad f
//   GeometricDynamics    ∇ẋ/dt = grad f + F(ẋ)
//   Sys4                 ∇ẋ/dt = g⁻¹⊗g(∇X)(ẋ) + F(X)
//   Sys5                 ∇ẋ/dt = grad f + F(X)
enum class SystemKind { Kinematic, Prolonged, Sys3, Potential, GeometricDynamics, Sys4, Sys5 };

const char* system_kind_name(SystemKind k);
std::optional<SystemKind> system_kind_from_name(const std::string& name);

struct DynSystem {
    SystemKind kind = SystemKind::GeometricDynamics;
    MetricField g;
    VectorField X;
    std::optional<VectorField> Y;  // perturbation for Prolonged
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<Vec> v;
    std::string integrator;
    double dt = 0.0;           // fixed-step policy
    double rtol = 0.0, atol = 0.0;  // tolerance policy
    long accepted = 0;
    long rejected = 0;
    std::vector<std::string> warnings;

    std::size_t size() const { return t.size(); }
};

struct EnergyRecord {
    std::vector<double> H;       // ½g(v,v) − f, recomputed per sample
    std::vector<double> f;
    std::vector<double> L_potential;  // ½g(v,v) + f   (empty for kinematic)
    std::vector<double> L_gd;         // ½g(v−X, v−X)  (empty for kinematic)
};

struct IntegratorSpec {
    enum class Method { RK4, DOPRI45 };
    Method method = Method::DOPRI45;
    double dt = 1e-3;      // RK4
    double rtol = 1e-10;   // DOPRI45
    double atol = 1e-12;
    long max_steps = 10'000'000;  // abort (with a diagnostic) beyond this

    static IntegratorSpec rk4(double dt) { return {Method::RK4, dt, 0, 0}; }
    static IntegratorSpec dopri45(double rtol, double atol) {
        return {Method::DOPRI45, 0, rtol, atol};
    }
};

// Coordinate-form right-hand side on state (x, v). The Γ-term converting
// covariant to coordinate acceleration is folded in here. For Kinematic,
// dx = X(x) and dv is zero (v is not part of the state).
void rhs(const DynSystem& sys, double t, const Vec& x, const Vec& v, Vec* dx, Vec* dv);

// L for Potential (½g(v,v)+f) and GeometricDynamics (½g(v−X,v−X)).
double lagrangian(const DynSystem& sys, const Vec& x, const Vec& v);

double hamiltonian(const MetricField& g, const VectorField& X, const Vec& x, const Vec& v);

std::pair<Trajectory, EnergyRecord> integrate(const DynSystem& sys, const Vec& x0, const Vec& v0,
                                              double t0, double t1, const IntegratorSpec& spec);

// Prolonged system for X+Y; parallelism of Y is verified along trajectories
// at integration time and reported as a warning, never an error.
DynSystem perturb_parallel(DynSystem sys, VectorField Y);

// max_k |(∇Y)(x_k)|_∞ over the given points (the parallelism diagnostic).
double max_covariant_derivative(const MetricField& g, const VectorField& Y,
                                const std::vector<Vec>& points);

}  // namespace geodyn
