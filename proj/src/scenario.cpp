#include "geodyn/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace geodyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& field,
                       const std::string& what) {
    throw ScenarioError(path + ": field '" + field + "': " + what);
}

Vec read_point(const json& j, const std::string& path, const std::string& field) {
    if (!j.is_array()) fail(path, field, "expected an array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(path, field, "expected numbers");
        v(static_cast<int>(i)) = j[i].get<double>();
    }
    return v;
}

FlowSpec read_flow(const json& jf, const std::string& path) {
    if (jf.is_string()) return builtin_flow(jf.get<std::string>());
    if (!jf.is_object()) fail(path, "flow", "expected a name or an object");

    ParamMap params;
    if (jf.contains("params")) {
        for (auto& [k, v] : jf.at("params").items()) {
            if (!v.is_number()) fail(path, "flow.params." + k, "expected a number");
            params[k] = v.get<double>();
        }
    }

    if (jf.contains("name")) return builtin_flow(jf.at("name").get<std::string>(), params);

    // Inline flow: {dim, metric (optional, row grid of expressions), X}.
    if (!jf.contains("dim") || !jf.at("dim").is_number_integer())
        fail(path, "flow.dim", "inline flows need an integer dimension");
    const int dim = jf.at("dim").get<int>();
    if (dim < 1) fail(path, "flow.dim", "must be positive");

    std::vector<std::string> names;
    for (const auto& [k, v] : params) names.push_back(k);

    FlowSpec s;
    s.name = "inline";
    s.dim = dim;
    s.defaults = params;

    if (jf.contains("metric")) {
        const json& jm = jf.at("metric");
        if (!jm.is_array() || static_cast<int>(jm.size()) != dim)
            fail(path, "flow.metric", "expected " + std::to_string(dim) + " rows");
        MetricField m;
        m.dim = dim;
        m.params = params;
        m.constant = true;
        m.entries.resize(static_cast<std::size_t>(dim) * dim);
        for (int i = 0; i < dim; ++i) {
            if (!jm[i].is_array() || static_cast<int>(jm[i].size()) != dim)
                fail(path, "flow.metric", "row " + std::to_string(i) + " has wrong length");
            for (int j = 0; j < dim; ++j) {
                const std::string src = jm[i][j].is_string()
                                            ? jm[i][j].get<std::string>()
                                            : json(jm[i][j]).dump();
                try {
                    ExprPtr e = parse(src, dim, names);
                    if (e->kind != Expr::Kind::Number) m.constant = false;
                    m.entries[static_cast<std::size_t>(i) * dim + j] = e;
                } catch (const Error& err) {
                    fail(path, "flow.metric[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                         err.what());
                }
            }
        }
        // symmetric as written
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < i; ++j)
                if (print(m.entries[static_cast<std::size_t>(i) * dim + j]) !=
                    print(m.entries[static_cast<std::size_t>(j) * dim + i]))
                    fail(path, "flow.metric", "not symmetric as written");
        s.metric = std::move(m);
    } else {
        s.metric = MetricField::euclidean(dim);
    }

    if (!jf.contains("X") || !jf.at("X").is_array() ||
        static_cast<int>(jf.at("X").size()) != dim)
        fail(path, "flow.X", "expected " + std::to_string(dim) + " component expressions");
    s.X.dim = dim;
    s.X.params = params;
    for (int i = 0; i < dim; ++i) {
        try {
            s.X.components.push_back(parse(jf.at("X")[i].get<std::string>(), dim, names));
        } catch (const Error& err) {
            fail(path, "flow.X[" + std::to_string(i) + "]", err.what());
        }
    }

    // Declare the signature from the evaluated metric at the origin-ish
    // sample; verified again wherever geometry needs nondegeneracy.
    Vec probe = Vec::Zero(dim);
    try {
        Eigen::SelfAdjointEigenSolver<Mat> es(s.metric.value(probe));
        s.metric.sig_pos = static_cast<int>((es.eigenvalues().array() > 0).count());
        s.metric.sig_neg = static_cast<int>((es.eigenvalues().array() < 0).count());
    } catch (const Error&) {
        // degenerate at the probe point only; leave declaration at (0,0)
    }
    return s;
}

IntegratorSpec read_integrator(const json& j, const std::string& path) {
    IntegratorSpec spec = IntegratorSpec::dopri45(1e-10, 1e-12);
    if (!j.contains("integrator")) return spec;
    const json& ji = j.at("integrator");
    const std::string name = ji.value("name", "dopri45");
    if (name == "rk4") {
        if (!ji.contains("dt")) fail(path, "integrator.dt", "rk4 requires dt");
        const double dt = ji.at("dt").get<double>();
        if (!(dt > 0)) fail(path, "integrator.dt", "must be positive");
        return IntegratorSpec::rk4(dt);
    }
    if (name == "dopri45") {
        const double rtol = ji.value("rtol", 1e-10);
        const double atol = ji.value("atol", 1e-12);
        if (!(rtol > 0) || !(atol > 0))
            fail(path, "integrator", "tolerances must be positive");
        return IntegratorSpec::dopri45(rtol, atol);
    }
    fail(path, "integrator.name", "unknown integrator '" + name + "'");
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

void append_csv_value(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError(path + ": invalid JSON: " + e.what());
    }

    Scenario s;
    s.path = path;
    if (!j.contains("flow")) fail(path, "flow", "required");
    try {
        s.flow = read_flow(j.at("flow"), path);
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& e) {
        fail(path, "flow", e.what());
    }

    const std::string sysname = j.value("system", "gd");
    auto kind = system_kind_from_name(sysname);
    if (!kind) fail(path, "system", "unknown system kind '" + sysname + "'");
    s.system = *kind;

    if (!j.contains("x0")) fail(path, "x0", "required");
    s.x0 = read_point(j.at("x0"), path, "x0");
    if (s.x0.size() != s.flow.dim)
        fail(path, "x0", "dimension " + std::to_string(s.x0.size()) + " does not match flow dim " +
                             std::to_string(s.flow.dim));

    if (j.contains("v0")) {
        s.v0 = read_point(j.at("v0"), path, "v0");
        s.has_v0 = true;
        if (s.v0.size() != s.flow.dim)
            fail(path, "v0", "dimension does not match flow dim");
    }
    if (s.system == SystemKind::Kinematic) {
        if (s.has_v0)
            s.warnings.push_back("v0 is ignored for kinematic systems (v = X(x) is recorded)");
    } else if (!s.has_v0) {
        fail(path, "v0", "required for second-order systems");
    }

    s.t0 = j.value("t0", 0.0);
    s.t1 = j.value("t1", 10.0);
    if (!(s.t1 > s.t0)) fail(path, "t1", "must exceed t0");

    s.integrator = read_integrator(j, path);
    if (j.contains("H0")) s.H0 = j.at("H0").get<double>();

    if (j.contains("checks")) {
        for (const auto& c : j.at("checks")) {
            const std::string name = c.get<std::string>();
            if (name != "conservation" && name != "horizontal" && name != "pregeodesic")
                fail(path, "checks", "unknown check '" + name + "'");
            s.checks.push_back(name);
        }
    }
    if (j.contains("outputs")) {
        s.out_trajectory = j.at("outputs").value("trajectory", "");
        s.out_report = j.at("outputs").value("report", "");
    }
    if (s.out_trajectory.empty()) s.out_trajectory = stem_of(path) + ".csv";
    if (s.out_report.empty()) s.out_report = stem_of(path) + ".report.json";

    if (j.contains("seeds"))
        for (const auto& seed : j.at("seeds"))
            s.equilibria_seeds.push_back(read_point(seed, path, "seeds"));
    return s;
}

void write_trajectory_csv(const std::string& path, const Scenario& s, const Trajectory& traj,
                          const EnergyRecord& rec) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write trajectory to " + path);
    const int n = s.flow.dim;
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= n; ++i) out << ",v" << i;
    out << ",H,f,L\n";

    const std::vector<double>* L = nullptr;
    if (s.system == SystemKind::GeometricDynamics)
        L = &rec.L_gd;
    else if (s.system == SystemKind::Potential)
        L = &rec.L_potential;

    std::string line;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        line.clear();
        append_csv_value(line, traj.t[k]);
        for (int i = 0; i < n; ++i) {
            line += ',';
            append_csv_value(line, traj.x[k](i));
        }
        for (int i = 0; i < n; ++i) {
            line += ',';
            append_csv_value(line, traj.v[k](i));
        }
        line += ',';
        append_csv_value(line, rec.H[k]);
        line += ',';
        append_csv_value(line, rec.f[k]);
        line += ',';
        if (L) append_csv_value(line, (*L)[k]);
        line += '\n';
        out << line;
    }
}

void write_report_json(const std::string& path, const Scenario& s,
                       const DiagnosticsReport& report, double elapsed_seconds) {
    json checks = json::array();
    for (const CheckResult& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"max_residual", c.max_residual},
                          {"mean_residual", c.mean_residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"inconclusive", c.inconclusive},
                          {"samples_used", c.samples_used},
                          {"notes", c.notes}});
    }
    json out = {{"scenario", s.path},
                {"system", system_kind_name(s.system)},
                {"checks", checks},
                {"timing", {{"seconds", elapsed_seconds}}}};
    std::ofstream f(path);
    if (!f) throw ScenarioError("cannot write report to " + path);
    f << out.dump(2) << "\n";
}

RunOutcome run_scenario(const Scenario& s, const std::string& out_dir, bool write_traj) {
    RunOutcome outcome;
    const auto started = std::chrono::steady_clock::now();

    DynSystem sys{s.system, s.flow.metric, s.flow.X, std::nullopt};
    Vec v0 = s.has_v0 ? s.v0 : Vec();

    Trajectory traj;
    EnergyRecord rec;
    try {
        std::tie(traj, rec) = integrate(sys, s.x0, v0, s.t0, s.t1, s.integrator);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s: integration failed: %s\n", s.path.c_str(), e.what());
        outcome.exit_code = 3;
        return outcome;
    }

    const double H0 = s.H0 ? *s.H0 : rec.H.front();
    for (const std::string& check : s.checks) {
        try {
            if (check == "conservation") {
                outcome.report.checks.push_back(check_conservation(traj, rec));
            } else if (check == "pregeodesic") {
                JacobiStructure js(s.flow.metric, s.flow.X, H0);
                outcome.report.checks.push_back(check_pregeodesic(traj, js));
            } else if (check == "horizontal") {
                JacobiStructure js(s.flow.metric, s.flow.X, H0);
                HorizontalResult h = check_horizontal(traj, js);
                outcome.report.checks.push_back(h.equation);
                outcome.report.checks.push_back(h.deflected);
            }
        } catch (const Error& e) {
            std::fprintf(stderr, "%s: check '%s' failed to run: %s\n", s.path.c_str(),
                         check.c_str(), e.what());
            outcome.exit_code = 3;
            return outcome;
        }
    }

    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
    const auto join = [&](const std::string& name) {
        return (std::filesystem::path(out_dir.empty() ? "." : out_dir) / name).string();
    };
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
        if (write_traj) {
            outcome.trajectory_path = join(s.out_trajectory);
            write_trajectory_csv(outcome.trajectory_path, s, traj, rec);
        }
        outcome.report_path = join(s.out_report);
        write_report_json(outcome.report_path, s, outcome.report, elapsed);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        outcome.exit_code = 3;
        return outcome;
    }

    for (const std::string& w : s.warnings) std::fprintf(stderr, "%s: %s\n", s.path.c_str(), w.c_str());
    for (const std::string& w : traj.warnings) std::fprintf(stderr, "%s: %s\n", s.path.c_str(), w.c_str());

    outcome.exit_code = outcome.report.all_pass() ? 0 : 1;
    return outcome;
}

}  // namespace geodyn
