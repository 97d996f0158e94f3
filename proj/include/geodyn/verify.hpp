#pragma once

#include <string>
#include <vector>

#include "geodyn/dynamics.hpp"
#include "geodyn/flows.hpp"

namespace geodyn {

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool inconclusive = false;
    std::size_t samples_used = 0;
    std::string notes;
};

struct DiagnosticsReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// Default tolerances: equation residuals 1e-5, geometric residuals 1e-4,
// conservation 1e-7 relative (10–100x integrator tolerance).
constexpr double kTolEquation = 1e-5;
constexpr double kTolGeometric = 1e-4;
constexpr double kTolConservation = 1e-7;

// Per-sample residual kernels. Each interior sample is independent, so the
// sweep is data-parallel; `parallel=false` selects the serial reference
// path. Endpoint samples (two at each edge) get no residual and are
// excluded from statistics.

// Normalized component of ḡ-acceleration orthogonal to velocity.
std::vector<double> pregeodesic_residuals(const Trajectory& traj, const JacobiStructure& js,
                                          bool parallel = true);
// (a) pointwise residual of the assembled gd equation.
std::vector<double> gd_equation_residuals(const Trajectory& traj, const JacobiStructure& js,
                                          bool parallel = true);
// (b) ḡ-pregeodesic residual with the F-force treated as connection deflection.
std::vector<double> deflected_pregeodesic_residuals(const Trajectory& traj,
                                                    const JacobiStructure& js,
                                                    bool parallel = true);

// World-force law part 1: acceleration under ḡ parallel to velocity.
CheckResult check_pregeodesic(const Trajectory& traj, const JacobiStructure& js,
                              double tolerance = kTolGeometric, bool parallel = true);

struct HorizontalResult {
    CheckResult equation;   // sub-residual (a), self-consistency of the gd equation
    CheckResult deflected;  // sub-residual (b), operational horizontality
};
CheckResult check_horizontal_equation(const Trajectory& traj, const JacobiStructure& js,
                                      double tolerance = kTolEquation, bool parallel = true);
CheckResult check_horizontal_deflected(const Trajectory& traj, const JacobiStructure& js,
                                       double tolerance = kTolGeometric, bool parallel = true);
HorizontalResult check_horizontal(const Trajectory& traj, const JacobiStructure& js,
                                  double tol_equation = kTolEquation,
                                  double tol_geometric = kTolGeometric, bool parallel = true);

CheckResult check_conservation(const Trajectory& traj, const EnergyRecord& record,
                               double tolerance = kTolConservation);

// Shooting demonstration of the three-energy-regime remark: for fixed
// endpoints, gd solutions with H < 0, H = 0 and H > 0 are sought by
// scanning initial speed and direction. A missing regime yields an
// inconclusive result with scan evidence in the notes, never a silent pass.
struct BoundaryValueSpec {
    Vec x0;
    Vec target;
    double t_max = 12.0;
    std::vector<double> speeds = {0.5, 1.0, 2.0};
    int direction_grid = 72;
};
CheckResult check_three_energy_regimes(const FlowSpec& flow, const BoundaryValueSpec& bvp);

// 4th-order derivative of the sampled velocity at interior index i, by a
// degree-4 polynomial fit through the 5 nearest samples (handles the
// non-uniform grids an adaptive integrator produces).
Vec velocity_derivative(const Trajectory& traj, std::size_t i);

}  // namespace geodyn
