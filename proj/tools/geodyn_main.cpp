#include <atomic>
#include <cstdio>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "geodyn/scenario.hpp"

namespace {

using namespace geodyn;

int run_batch(const std::vector<std::string>& files, const std::string& out_dir, int jobs,
              bool write_trajectory) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{0};
    std::mutex stderr_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            int code;
            try {
                Scenario s = load_scenario(files[i]);
                RunOutcome out = run_scenario(s, out_dir, write_trajectory);
                code = out.exit_code;
                std::lock_guard<std::mutex> lock(stderr_mutex);
                for (const CheckResult& c : out.report.checks)
                    std::printf("%s: %-22s %s  max=%.3e  tol=%.3e  samples=%zu%s\n",
                                files[i].c_str(), c.name.c_str(),
                                c.inconclusive ? "INCONCLUSIVE" : (c.pass ? "PASS" : "FAIL"),
                                c.max_residual, c.tolerance, c.samples_used,
                                c.notes.empty() ? "" : ("  [" + c.notes + "]").c_str());
            } catch (const ScenarioError& e) {
                std::lock_guard<std::mutex> lock(stderr_mutex);
                std::fprintf(stderr, "%s\n", e.what());
                code = 2;
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(stderr_mutex);
                std::fprintf(stderr, "%s: %s\n", files[i].c_str(), e.what());
                code = 3;
            }
            int prev = worst.load();
            while (prev < code && !worst.compare_exchange_weak(prev, code)) {
            }
        }
    };

    const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return worst.load();
}

void print_flows() {
    {
        FlowSpec p = pendulum();
        std::printf("pendulum  dim=2  X = (-x2, x1) on (R^2, delta)\n");
        std::printf("  f = (x1^2 + x2^2)/2, rot X = (0,0,2), div X = 0; %s\n", p.notes.c_str());
        std::printf("  closed forms: kinematic circles, prolonged circles with centre,"
                    " gd spirals b1 cos t + b2 sin t + b3 t cos t + b4 t sin t\n");
    }
    {
        FlowSpec l = lorenz();
        std::printf("lorenz    dim=3  params sigma=10 r=28 b=8/3\n");
        std::printf("  chaos threshold r0 = sigma*(sigma+b+3)/(sigma-b-1)");
        if (l.chaos_threshold) std::printf(" = %.6f at defaults", *l.chaos_threshold);
        std::printf("\n  equilibria: origin and (+-sqrt(b(r-1)), +-sqrt(b(r-1)), r-1)\n");
    }
    {
        FlowSpec a = abc();
        std::printf("abc       dim=3  params A=B=C=1 (Beltrami: rot X = X)\n");
        std::printf("  %s\n", a.notes.c_str());
    }
}

int run_equilibria(const std::string& file) {
    Scenario s = load_scenario(file);
    std::vector<Vec> seeds = s.equilibria_seeds;
    if (seeds.empty()) {
        // default seed grid: 5 points per axis over a flow-sized box
        const int n = s.flow.dim;
        const double lo = s.flow.name == "abc" ? 0.0 : -12.0;
        const double hi = s.flow.name == "abc" ? 6.283185307179586 : 30.0;
        const int per_axis = 5;
        std::vector<Vec> grid(1, Vec::Zero(n));
        for (int d = 0; d < n; ++d) {
            std::vector<Vec> next;
            for (const Vec& base : grid)
                for (int k = 0; k < per_axis; ++k) {
                    Vec p = base;
                    p(d) = lo + (hi - lo) * k / (per_axis - 1);
                    next.push_back(p);
                }
            grid = std::move(next);
        }
        seeds = std::move(grid);
    }
    int dropped = 0;
    std::vector<Vec> found = find_equilibria(s.flow, seeds, &dropped);
    std::printf("%zu equilibria (from %zu seeds, %d non-converged):\n", found.size(),
                seeds.size(), dropped);
    for (const Vec& p : found) {
        std::printf(" ");
        for (int i = 0; i < p.size(); ++i) std::printf(" %.12g", p(i));
        std::printf("   |X| = %.3e\n", s.flow.X.value(p).norm());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric dynamics of flows: simulate prolonged systems, "
                 "verify conservation/pregeodesic structure"};
    app.require_subcommand(1);

    std::vector<std::string> files;
    std::string out_dir = ".";
    int jobs = 1;

    CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario and write CSV + report");
    sim->add_option("scenarios", files, "scenario JSON file(s)")->required();
    sim->add_option("--out-dir", out_dir, "output directory");
    sim->add_option("--jobs", jobs, "parallel scenario jobs");

    CLI::App* ver = app.add_subcommand("verify", "run checks only (integrates internally)");
    ver->add_option("scenarios", files, "scenario JSON file(s)")->required();
    ver->add_option("--out-dir", out_dir, "output directory");
    ver->add_option("--jobs", jobs, "parallel scenario jobs");

    app.add_subcommand("flows", "list built-in flows with parameter defaults and stored data");

    CLI::App* eq = app.add_subcommand("equilibria", "Newton search for zeros of X");
    eq->add_option("scenario", files, "scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_batch(files, out_dir, jobs, true);
        if (ver->parsed()) return run_batch(files, out_dir, jobs, false);
        if (app.get_subcommand("flows")->parsed()) {
            print_flows();
            return 0;
        }
        return run_equilibria(files.at(0));
    } catch (const geodyn::ScenarioError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const geodyn::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    }
}
