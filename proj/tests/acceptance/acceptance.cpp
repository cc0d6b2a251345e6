// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ddspec/bloch.hpp"
#include "ddspec/overlap.hpp"
#include "ddspec/spectroscopy.hpp"
#include "ddspec/welch.hpp"
#include "support/anatomy.hpp"
#include "support/oracles.hpp"

using namespace ddspec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned hw_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

/// 2 sigma^2 gamma / (gamma^2 + (2 pi f)^2), written out independently of the library.
double lorentzian_oracle(double sigma, double gamma, double f) {
    const double w = 2.0 * oracle::pi * f;
    return 2.0 * sigma * sigma * gamma / (gamma * gamma + w * w);
}

// 1 -------------------------------------------------------------------------------------
Outcome parseval() {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> count(1, 64);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double T = 0.05 + 1.95 * u(rng);
        const std::size_t n = count(rng);
        std::vector<double> times(n);
        for (auto& t : times) t = T * u(rng);
        std::sort(times.begin(), times.end());
        const auto F = filter_pulse_train(times, T, default_grid(T, 0.0, n));
        worst = std::max(worst, std::abs(2.0 * F.integral() - T) / T);
    }
    double worst_drive = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double t = 0.2 + 1.8 * u(rng);
        const double f0 = 20.0 + 480.0 * u(rng);
        const auto F = filter_constant_drive(f0, t, default_grid(t, f0));
        worst_drive = std::max(worst_drive, std::abs(2.0 * F.integral() - t / 2.0) / (t / 2.0));
    }
    return {worst < 1e-3 && worst_drive < 5e-3,
            fmt("max rel err trains %.2e (<1e-3), constant drive %.2e (<5e-3)", worst, worst_drive)};
}

// 2 -------------------------------------------------------------------------------------
Outcome drive_oracle() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double sigma = 5.0 + 95.0 * u(rng);
        const double gamma = 50.0 + 2000.0 * u(rng);
        const double f0 = 20.0 + 480.0 * u(rng);
        const double t = 100.0 / f0;
        const BathSpectrum G = BathSpectrum::lorentzian_for(sigma, gamma);
        const double want = lorentzian_oracle(sigma, gamma, f0) / 4.0;
        const double got = continuous_drive_rate(G, f0, t);
        worst = std::max(worst, std::abs(got - want) / want);
    }
    return {worst < 0.02, fmt("max |R - G(f0)/4| / (G(f0)/4) = %.4f (<0.02)", worst)};
}

// 3 -------------------------------------------------------------------------------------
Outcome kubo() {
    struct Case {
        double sigma, tau, t_end;
    };
    // sigma tau = 0.01 and 0.1; both decay to C ~ 0.2 at the last time.
    const Case cases[] = {{100.0, 1e-4, 1.5}, {20.0, 5e-3, 0.8}};
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const double dt = c.tau / 10.0;
        const auto steps = static_cast<std::size_t>(std::llround(c.t_end / dt));
        OrnsteinUhlenbeckNoise src(c.sigma, 1.0 / c.tau, NoiseGrid{2000, steps, dt, 3});
        const auto times = linspace(c.t_end / 10.0, c.t_end, 10);
        EnsembleOptions eo;
        eo.threads = hw_threads();
        const auto mc = ensemble_coherence(src, free_evolution(c.t_end), times, eo);
        const WaveformFamily free = [](double t) { return ControlWaveform{free_evolution(t)}; };
        const auto pred = coherence_curve(BathSpectrum::lorentzian_for(c.sigma, 1.0 / c.tau), free, times);
        double zmax = 0.0, pmax = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double k = oracle::kubo(c.sigma, c.tau, times[i]);
            zmax = std::max(zmax, std::abs(mc.values[i] - k) / mc.std_errors[i]);
            if (k >= 0.2) pmax = std::max(pmax, std::abs(pred.values[i] - k) / k);
        }
        ok = ok && zmax <= 3.0 && pmax <= 0.10;
        detail += fmt("sigma*tau=%.2f: max |MC-Kubo|/se %.2f (<=3), overlap rel %.4f (<=0.1); ", c.sigma * c.tau, zmax, pmax);
    }
    return {ok, detail};
}

// 4 -------------------------------------------------------------------------------------
struct VerifyRow {
    double f0, rel;
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DDSPEC_CLI_PATH) + " " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<VerifyRow> read_verify(const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);  // status,f0_hz,rate_mc,rate_mc_sigma,rate_pred,rel_dev
    std::vector<VerifyRow> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() == 6) rows.push_back({std::stod(cells[1]), std::stod(cells[5])});
    }
    return rows;
}

const fs::path kConfigs = fs::path(DDSPEC_SOURCE_DIR) / "configs";
const fs::path kScratch = fs::temp_directory_path() / "ddspec_acceptance";

Outcome dichotomy() {
    const auto weak_dir = kScratch / "verify_weak";
    const auto strong_dir = kScratch / "verify_strong";
    const int rw = run_cli("verify --config " + (kConfigs / "verify_weak.json").string() + " --out-dir " + weak_dir.string());
    const int rs = run_cli("verify --config " + (kConfigs / "verify_strong.json").string() + " --out-dir " + strong_dir.string());
    if (rw != 0 && rw != 4) return {false, fmt("verify exited with %d (weak)", rw)};
    if (rs != 0 && rs != 4) return {false, fmt("verify exited with %d (strong)", rs)};
    const auto weak = read_verify(weak_dir / "verify.csv");
    const auto strong = read_verify(strong_dir / "verify.csv");
    double weak_max = 0.0, low_max = 0.0, high_max = 0.0;
    for (const auto& r : weak)
        if (r.f0 >= 20.0 && r.f0 <= 500.0) weak_max = std::max(weak_max, r.rel);
    for (const auto& r : strong) {
        if (r.f0 < 100.0) low_max = std::max(low_max, r.rel);
        if (r.f0 > 200.0) high_max = std::max(high_max, r.rel);
    }
    const bool ok = !weak.empty() && !strong.empty() && weak_max <= 0.15 && low_max > 0.5 && high_max <= 0.2;
    return {ok, fmt("weak: max rel dev %.3f (<=0.15); strong: below 100 Hz max %.3f (>0.5), above 200 Hz max %.3f (<=0.2)",
                    weak_max, low_max, high_max)};
}

// 5 -------------------------------------------------------------------------------------
Outcome motional_peak() {
    TrapConfig trap;  // 600 / 160 Hz, 7 uK
    CollisionConfig coll;
    coll.rate = 20.0;
    SimulationSettings sim;
    sim.n_atoms = 400;
    sim.duration = 2.0;
    sim.seed = 5;
    BathSimulator bath(trap, coll, sim, hw_threads());
    WelchSettings ws;
    ws.threads = hw_threads();
    const auto s = estimate_spectrum(bath, ws);
    // Strongest bin between the Lorentzian shoulder and the radial feature.
    std::size_t best = 0;
    for (std::size_t k = 0; k < s.f.size(); ++k)
        if (s.f[k] >= 200.0 && s.f[k] <= 600.0 && (best == 0 || s.G[k] > s.G[best])) best = k;
    const bool is_max = best > 0 && best + 1 < s.f.size() && s.G[best] > s.G[best - 1] && s.G[best] > s.G[best + 1];
    const double f = s.f[best];
    return {is_max && std::abs(f - 320.0) <= 0.15 * 320.0,
            fmt("local maximum at %.1f Hz (320 +- 48), bin width %.2f Hz", f, s.f[1] - s.f[0])};
}

// 6 -------------------------------------------------------------------------------------
Outcome ranking() {
    // Same conditions as criterion 5, run longer so the Welch bins resolve the
    // few-hertz Lorentzian corner.
    CollisionConfig coll;
    coll.rate = 20.0;
    SimulationSettings sim;
    sim.n_atoms = 100;
    sim.duration = 8.0;
    sim.seed = 6;
    BathSimulator bath(TrapConfig{}, coll, sim, hw_threads());
    WelchSettings ws;
    ws.threads = hw_threads();
    const auto s = estimate_spectrum(bath, ws);
    // Fit below the motional features only.
    std::vector<double> f, g, sg;
    for (std::size_t k = 0; k < s.f.size() && s.f[k] < 100.0; ++k) {
        f.push_back(s.f[k]);
        g.push_back(s.G[k]);
        sg.push_back(s.sigma[k]);
    }
    const auto fit = fit_lorentzian(f, g, sg);
    const BathSpectrum G(fit.params);
    const double T = 0.4;
    auto rate = [&](const std::vector<double>& times) { return predicted_rate(G, make_pulse_train(times, T), T); };
    // Overlaps that agree to this relative level count as ties.
    const double tie = 1e-4;
    std::map<std::size_t, double> cpmg;
    for (std::size_t n = 4; n <= 64; ++n) cpmg[n] = rate(cpmg_times(n, T));
    std::size_t udd_bad = 0, cdd_bad = 0, mono_bad = 0;
    double worst_udd = INFINITY, worst_cdd = INFINITY;
    for (std::size_t n = 4; n <= 64; ++n) {
        const double u = rate(udd_times(n, T));
        worst_udd = std::min(worst_udd, u / cpmg[n]);
        if (cpmg[n] > u * (1.0 + tie)) ++udd_bad;
        if (n > 4 && 1.0 / cpmg[n] < 1.0 / cpmg[n - 1] * (1.0 - tie)) ++mono_bad;
    }
    for (std::size_t order = 1; order <= 6; ++order) {
        const auto c = cdd_times(order, T);
        if (c.size() < 4 || c.size() > 64) continue;
        const double r = rate(c);
        worst_cdd = std::min(worst_cdd, r / cpmg[c.size()]);
        if (cpmg[c.size()] > r * (1.0 + tie)) ++cdd_bad;
    }
    return {udd_bad == 0 && cdd_bad == 0 && mono_bad == 0,
            fmt("fitted g0 %.3g 1/s, f_c %.3g Hz; min UDD/CPMG rate %.4f, min CDD/CPMG %.4f; violations udd %zu cdd %zu "
                "monotone %zu",
                fit.params.g0, fit.params.f_c, worst_udd, worst_cdd, udd_bad, cdd_bad, mono_bad)};
}

// 7 -------------------------------------------------------------------------------------
Outcome anatomy() {
    const auto a = analyze_cpmg(16, 1.0);
    const bool ok = std::abs(a.peak_hz - 8.0) <= a.grid_step && a.envelope_r2 > 0.95 &&
                    std::abs(a.harmonic_ratio - 1.0 / 9.0) <= 0.15 / 9.0;
    return {ok, fmt("peak %.3f Hz (8 +- %.3f), envelope R2 %.4f (>0.95), 3f0 ratio %.4f (1/9 +- 15%%)", a.peak_hz,
                    a.grid_step, a.envelope_r2, a.harmonic_ratio)};
}

// 8 -------------------------------------------------------------------------------------
Outcome mle_coverage() {
    bool ok = true;
    std::string detail;
    for (double c : {0.0, 0.3, 0.7, 1.0}) {
        std::size_t hit = 0;
        for (std::uint64_t k = 0; k < 500; ++k) {
            const auto z = synthesize_scan(c, 30, 0.05, 4242, k + static_cast<std::uint64_t>(c * 1e4) * 1000);
            const auto e = mle_envelope(z, 0.05);
            if (e.lower <= c && c <= e.upper) ++hit;
        }
        const double cov = static_cast<double>(hit) / 500.0;
        ok = ok && cov >= 0.55 && cov <= 0.80;
        detail += fmt("C=%.1f: %.3f ", c, cov);
    }
    return {ok, detail + "(in [0.55, 0.80])"};
}

// 9 -------------------------------------------------------------------------------------
Outcome end_to_end() {
    const double sigma = 30.0, gamma = 600.0;
    OrnsteinUhlenbeckNoise src(sigma, gamma, NoiseGrid{400, 8000, 1e-4, 91});
    MeasurementConfig cfg;
    cfg.f0_grid = {50.0, 70.0, 90.0, 120.0, 150.0, 200.0, 250.0, 300.0, 400.0, 500.0};
    cfg.durations = {0.2, 0.4, 0.8};
    cfg.seed = 19;
    cfg.threads = hw_threads();
    const auto m = measure_spectrum(src, cfg);
    const auto& tab = m.spectrum.tabulated();
    std::size_t good = 0;
    for (std::size_t i = 0; i < tab.grid.size(); ++i)
        if (std::abs(tab.values[i] - lorentzian_oracle(sigma, gamma, tab.grid[i])) <= 2.0 * tab.sigma[i]) ++good;
    const double frac = static_cast<double>(good) / static_cast<double>(tab.grid.size());

    // Forward then invert on the analytic spectrum.
    const BathSpectrum G = BathSpectrum::lorentzian_for(sigma, gamma);
    std::vector<RatePoint> rates;
    for (double f0 : cfg.f0_grid) rates.push_back({f0, continuous_drive_rate(G, f0, 1.0), 0.0});
    const auto back = invert_spectrum(rates);
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.f0_grid.size(); ++i) {
        const double want = lorentzian_oracle(sigma, gamma, cfg.f0_grid[i]);
        worst = std::max(worst, std::abs(back.tabulated().values[i] - want) / want);
    }
    return {frac >= 0.8 && worst <= 0.03,
            fmt("%zu/%zu points within 2 sigma (>=80%%); round trip max rel err %.4f (<=0.03)", good, tab.grid.size(),
                worst)};
}

// 10 ------------------------------------------------------------------------------------
Outcome determinism() {
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"simulate-bath", "simulate_bath.json"}, {"filter", "filter_cpmg16.json"},
        {"filter", "filter_constant_drive.json"}, {"predict", "predict_cpmg.json"},
        {"measure-spectrum", "measure_spectrum.json"}, {"verify", "verify_ou.json"},
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::size_t compared = 0;
    std::string bad;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& [cmd, cfg] = runs[i];
        const auto base = kScratch / ("det" + std::to_string(i));
        for (const char* t : {"1", "8"}) {
            const int rc = run_cli(cmd + " --config " + (kConfigs / cfg).string() + " --threads " + t + " --out-dir " +
                                   (base / t).string());
            if (rc != 0 && rc != 4) return {false, fmt("%s exited with %d", cmd.c_str(), rc)};
        }
        for (const auto& e : fs::directory_iterator(base / "1")) {
            const auto name = e.path().filename();
            if (name == "manifest.json") continue;  // carries the wall time
            ++compared;
            if (!fs::exists(base / "8" / name) || slurp(e.path()) != slurp(base / "8" / name))
                bad += cmd + "/" + name.string() + " ";
        }
    }
    return {bad.empty() && compared > 0,
            bad.empty() ? fmt("%zu data files byte-identical at 1 and 8 threads", compared) : "differs: " + bad};
}

}  // namespace

// Usage: ddspec_acceptance [--known-fail ID]...
// Every criterion always prints its real verdict. A criterion listed with
// --known-fail does not affect the exit status; ctest passes the ones
// documented as unattainable.
int main(int argc, char** argv) {
    std::vector<int> known;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--known-fail" && i + 1 < argc) {
            known.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--known-fail ID]...\n", argv[0]);
            return 2;
        }
    }
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "parseval", 10, parseval},
        {2, "continuous-drive oracle", 5, drive_oracle},
        {3, "kubo oracle", 120, kubo},
        {4, "weak/strong dichotomy", 600, dichotomy},
        {5, "motional feature", 300, motional_peak},
        {6, "sequence ranking", 30, ranking},
        {7, "cpmg filter anatomy", 10, anatomy},
        {8, "mle calibration", 60, mle_coverage},
        {9, "end-to-end loop", 600, end_to_end},
        {10, "cli determinism", INFINITY, determinism},
    };
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
    int failed = 0, blocking = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        const bool excused = std::find(known.begin(), known.end(), c.id) != known.end();
        failed += !pass;
        blocking += !pass && !excused;
        std::printf("%s %2d %-24s %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    if (failed > blocking) std::printf("%d failure(s) on the known-fail list\n", failed - blocking);
    return blocking ? 1 : 0;
}
