#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geodyn/dynamics.hpp"

namespace geodyn {

// A closed-form solution family x(t; c) of one of the prolonged systems,
// kept as data so tests can machine-check it against the assembled ODE.
struct SolutionFamily {
    SystemKind system;
    int ncoef = 0;
    std::function<Vec(double, const Vec&)> position;
    std::function<Vec(double, const Vec&)> velocity;
    std::function<Vec(double, const Vec&)> acceleration;
    std::string description;
};

// Built-in flow together with its published data. The stored formulas are
// claims under test; the generic pipeline is the source of truth.
struct FlowSpec {
    std::string name;
    int dim = 0;
    MetricField metric;
    VectorField X;
    ParamMap defaults;

    std::vector<ExprPtr> curl;   // rot X components (empty if not stored)
    ExprPtr divergence;          // null if not stored
    ExprPtr energy_formula;      // closed-form f (null if not stored)
    std::vector<Vec> equilibria; // closed form, at the bound parameters
    std::optional<double> chaos_threshold;
    std::vector<SolutionFamily> families;
    std::function<double(const Vec&)> equilibrium_surface;  // null if none
    std::string notes;
};

FlowSpec pendulum();
FlowSpec lorenz(double sigma = 10.0, double r = 28.0, double b = 8.0 / 3.0);
FlowSpec abc(double A = 1.0, double B = 1.0, double C = 1.0);

// Built-in flow by CLI name; throws Error for unknown names. Parameter
// overrides are applied on top of the defaults.
FlowSpec builtin_flow(const std::string& name, const ParamMap& overrides = {});

// Damped Newton on X(x) = 0 from each seed; converged points (|X| < 1e-10)
// are deduplicated at distance 1e-6. Non-converged seeds are dropped and
// counted in *dropped when provided.
std::vector<Vec> find_equilibria(const FlowSpec& spec, const std::vector<Vec>& seeds,
                                 int* dropped = nullptr);

}  // namespace geodyn
