#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geodyn/verify.hpp"

namespace geodyn {

struct ScenarioError : Error {
    using Error::Error;
};

// One simulation/verification job: flow + system + initial state + window
// + integrator + requested checks, loaded from a JSON file.
struct Scenario {
    std::string path;
    FlowSpec flow;
    SystemKind system = SystemKind::GeometricDynamics;
    Vec x0;
    Vec v0;
    bool has_v0 = false;
    double t0 = 0.0, t1 = 10.0;
    IntegratorSpec integrator;
    std::optional<double> H0;  // default: H(x0, v0)
    std::vector<std::string> checks;
    std::string out_trajectory;  // defaults derived from scenario filename
    std::string out_report;
    std::vector<Vec> equilibria_seeds;  // optional, for the equilibria command
    std::vector<std::string> warnings;
};

Scenario load_scenario(const std::string& path);

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 check failed, 2 validation, 3 runtime
    DiagnosticsReport report;
    std::string trajectory_path;
    std::string report_path;
};

// simulate: integrate, write trajectory CSV + diagnostics JSON, run checks.
RunOutcome run_scenario(const Scenario& s, const std::string& out_dir,
                        bool write_trajectory = true);

void write_trajectory_csv(const std::string& path, const Scenario& s, const Trajectory& traj,
                          const EnergyRecord& rec);
void write_report_json(const std::string& path, const Scenario& s,
                       const DiagnosticsReport& report, double elapsed_seconds);

}  // namespace geodyn
