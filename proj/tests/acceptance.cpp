// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Presets run at full size; artifacts land in ./acceptance_runs.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ricker/experiment.hpp"

using namespace ricker;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = "acceptance_runs";

struct Timed
{
    RunSummary summary;
    double seconds = 0.0;
};

std::map<std::string, Timed> g_runs;
int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Timed& run(const std::string& name)
{
    auto it = g_runs.find(name);
    if (it != g_runs.end()) {
        return it->second;
    }
    auto c = preset(name);
    c.workers = 1;
    c.output_dir = (kRoot / "a" / name).string();
    const auto t0 = std::chrono::steady_clock::now();
    Timed t{run_experiment(c), 0.0};
    t.seconds = seconds_since(t0);
    return g_runs.emplace(name, std::move(t)).first->second;
}

void report(int id, const std::string& title, bool ok, const std::string& detail)
{
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    g_failures += ok ? 0 : 1;
}

/// Every verdict whose check starts with `prefix` must pass; at least one must exist.
bool verdicts_pass(const RunSummary& s, const std::string& prefix, std::string& detail)
{
    bool any = false;
    bool ok = true;
    for (const auto& v : s.verdicts) {
        if (v.check.rfind(prefix, 0) == 0) {
            any = true;
            ok = ok && v.status == Status::pass;
            detail += "\n    " + s.config.scenario_id + " " + v.check + ": " + v.measured + " [" + to_string(v.status) + "]";
        }
    }
    if (!any) {
        detail += "\n    " + s.config.scenario_id + ": no verdict '" + prefix + "'";
    }
    return any && ok;
}

std::string secs(double s) { return io::format_sig(s, 3) + " s"; }

void criterion_deterministic()
{
    const auto t0 = std::chrono::steady_clock::now();
    const growth::Ricker m{1.0, 1.0};
    double worst = 0.0;
    for (double x0 : {0.01, 1.0, 10.0}) {
        const auto path = simulate_trajectory(m, noise::Dirac0{}, LogState::from_density(x0), 10000, 1, 0);
        double x = x0;
        for (std::size_t n = 0; n < path.size(); ++n) {
            worst = std::max(worst, std::abs(std::exp(path[n].value) - x) / x);
            x = x * std::exp(m.r - m.a * x);
        }
    }
    const double t = seconds_since(t0);
    report(1, "deterministic oracle", worst <= 1e-12 && t < 1.0,
           "max relative error " + io::format_sig(worst, 3) + " over 3 x 10^4 steps, " + secs(t));
}

void criterion_commonness_mean()
{
    const auto& r = run("T2.1a");
    bool ok = true;
    std::string d;
    double prev = -1.0;
    for (const auto& x : r.summary.runs) {
        const double frac = static_cast<double>(x.hit_at_one) / static_cast<double>(x.samples.size());
        ok = ok && x.mean.mean >= 1.0 && x.mean.mean <= 1.05 && frac >= prev;
        if (x.x0 == 1e6) {
            ok = ok && frac >= 0.99;
        }
        prev = frac;
        d += "X0=" + io::format_sig(x.x0) + ": mean " + io::format_sig(x.mean.mean, 6) + ", Hit{1} " +
             io::format_sig(frac, 6) + "; ";
    }
    report(2, "T2.1a mean commonness exit", ok, d + secs(r.seconds));
}

void criterion_from_verdicts(int id, const std::string& title, const std::vector<std::pair<std::string, std::string>>& checks,
                             double time_limit)
{
    bool ok = true;
    std::string d;
    double total = 0.0;
    std::map<std::string, bool> counted;
    for (const auto& [name, prefix] : checks) {
        const auto& r = run(name);
        ok = verdicts_pass(r.summary, prefix, d) && ok;
        if (!counted[name]) {
            total += r.seconds;
            counted[name] = true;
        }
    }
    if (time_limit > 0) {
        ok = ok && total < time_limit;
    }
    report(id, title, ok, secs(total) + d);
}

void criterion_estimators()
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string d;
    const std::size_t n = 100000;
    const std::size_t k = n / 10;
    for (double alpha : {0.5, 1.5, 2.0}) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            RngStream rng(seed, 0);
            std::vector<double> v(n);
            for (auto& x : v) {
                x = std::pow(rng.uniform_open(), -1.0 / alpha);
            }
            const std::vector<std::uint8_t> cens(n, 0);
            const auto fit = hill_estimate(v, cens, k);
            const double rel = std::abs(fit.value - alpha) / alpha;
            ok = ok && fit.estimable && rel <= 0.05;
            d += io::format_sig(fit.value, 4) + " ";
        }
        d += "(alpha " + io::format_sig(alpha) + "); ";
    }
    double worst = 0.0;
    for (double q : {0.5, 0.25, 0.9, std::exp(-2.0)}) {
        SurvivalCurve c;
        c.n_total = 1000000;
        c.horizon = 200;
        for (std::int64_t m = 0; m <= 60; ++m) {
            c.points.push_back({m, std::pow(q, static_cast<double>(m))});
        }
        const auto fit = fit_exponential_rate(c, 0, 60);
        worst = std::max(worst, std::abs(fit.value + std::log(q)) / -std::log(q));
    }
    ok = ok && worst <= 1e-12;
    const double t = seconds_since(t0);
    ok = ok && t < 1.0;
    report(11, "estimator validation", ok,
           "Hill k = " + std::to_string(k) + ": " + d + "geometric rate max relative error " +
               io::format_sig(worst, 3) + ", " + secs(t));
}

void criterion_reproducible()
{
    bool ok = true;
    std::string d;
    std::size_t files = 0;
    for (const auto& name : preset_names()) {
        run(name);
        for (const char* tag : {"b", "c"}) {
            auto c = preset(name);
            c.workers = std::string(tag) == "b" ? 1 : 8;
            c.output_dir = (kRoot / tag / name).string();
            run_experiment(c);
        }
        for (const auto& e : fs::directory_iterator(kRoot / "a" / name)) {
            const auto fname = e.path().filename().string();
            if (fname.rfind("samples", 0) != 0) {
                continue;
            }
            ++files;
            const auto a = io::read_file(e.path());
            for (const char* tag : {"b", "c"}) {
                const auto other = kRoot / tag / name / fname;
                if (!fs::exists(other) || io::read_file(other) != a) {
                    ok = false;
                    d += "\n    " + name + "/" + fname + " differs in run " + tag;
                }
            }
        }
    }
    report(12, "reproducibility (same seed twice, 1 vs 8 workers)", ok,
           std::to_string(files) + " sample files compared across " + std::to_string(preset_names().size()) +
               " presets" + d);
}

}  // namespace

int main()
{
    fs::remove_all(kRoot);
    criterion_deterministic();
    criterion_commonness_mean();
    criterion_from_verdicts(3, "T2.1b exponential commonness bound",
                            {{"T2.1b", "survival bound"}, {"T2.1b", "exponential rate"}}, 60);
    criterion_from_verdicts(4, "T2.2 medium band", {{"T2.2", "survival bound"}, {"T2.2", "ln-survival linear"}}, 60);
    criterion_from_verdicts(5, "T3.1 transience",
                            {{"T3.1", "never leaves rarity"}, {"T3.1", "censored paths drift"}}, 0);
    criterion_from_verdicts(6, "T4.1 logarithmic mean",
                            {{"T4.1", "E T_eps sandwich"}, {"T4.1", "E T_eps linear"}}, 60);
    criterion_from_verdicts(7, "T4.1 exponential tail", {{"T4.1", "survival bound S(n) <= C rho*^n at X0=0.001"}}, 60);
    criterion_from_verdicts(8, "T4.2 heavy tail", {{"T4.2", "survival exponent"}, {"T4.2-gaussian", "no power tail"}},
                            0);
    criterion_from_verdicts(9, "T5.1 universal survival exponent",
                            {{"T5.1", "survival exponent"},
                             {"T5.1-pareto", "survival exponent"},
                             {"T5.1", "mean divergence"},
                             {"T5.1-pareto", "mean divergence"}},
                            0);
    criterion_from_verdicts(10, "T6.1 case 1",
                            {{"T6.1-case1", "tau^M can be infinite"},
                             {"T6.1-case1", "T_L (species 1) finite mean"},
                             {"T6.1-case1", "T_eps (species 1) finite mean"}},
                            60);
    criterion_estimators();
    criterion_reproducible();
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
