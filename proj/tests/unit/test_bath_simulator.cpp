#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "ddspec/io.hpp"
#include "ddspec/welch.hpp"
#include "support/oracles.hpp"

using namespace ddspec;

namespace {

SimulationSettings settings(std::size_t atoms, double duration, std::uint64_t seed = 7) {
    SimulationSettings s;
    s.n_atoms = atoms;
    s.duration = duration;
    s.seed = seed;
    return s;
}

/// Exact PSD of a sampled stationary sequence with correlation sigma^2 a^|k|,
/// a = exp(-rate dt), under the density convention dt |X|^2.
double ar1_psd(double sigma, double rate, double dt, double f) {
    const double a = std::exp(-rate * dt);
    return dt * sigma * sigma * (1.0 - a * a) / (1.0 - 2.0 * a * std::cos(2.0 * oracle::pi * f * dt) + a * a);
}

struct MeanSe {
    double mean, se;
};

MeanSe mean_se(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

TEST(TrapModel, AxialAtomPotentialPeriodicAtTwiceAxialFrequency) {
    const TrapModel model(TrapConfig{});
    AtomState s;
    s.r = {0.0, 0.0, 3e-6};
    const double dt = 1.0 / (40.0 * 600.0);
    std::array<double, 3> c, sn;
    for (int k = 0; k < 3; ++k) {
        c[k] = std::cos(model.omega()[k] * dt);
        sn[k] = std::sin(model.omega()[k] * dt);
    }
    // 2 f_axial = 320 Hz; half an axial period is exactly 75 steps of 1/24000 s.
    std::vector<double> u;
    for (int k = 0; k < 600; ++k) {
        u.push_back(model.potential(s.r));
        model.advance_harmonic(s, c, sn);
    }
    const double umax = *std::max_element(u.begin(), u.end());
    for (std::size_t k = 0; k + 75 < u.size(); ++k) EXPECT_NEAR(u[k + 75], u[k], 1e-9 * umax);
    EXPECT_LT(u[37], 0.01 * umax);  // passes the trap centre a quarter period in
}

TEST(BathSimulator, CollisionlessTraceIsPeriodic) {
    // Radial 600 Hz and axial 160 Hz potentials repeat at 1/1200 s and 1/320 s,
    // so the sum repeats every 1/80 s = 300 steps.
    BathSimulator bath(TrapConfig{}, CollisionConfig{}, settings(1, 0.1));
    std::vector<double> d(bath.n_steps());
    bath.fill_trace(0, d);
    double scale = 0.0;
    for (double x : d) scale = std::max(scale, std::abs(x));
    for (std::size_t k = 0; k + 300 < d.size(); ++k) EXPECT_NEAR(d[k + 300], d[k], 1e-9 * scale);
}

TEST(BathSimulator, HarmonicEnergyConserved) {
    const TrapModel model(TrapConfig{});
    CounterRng rng(3, 0);
    const double dt = 1.0 / (40.0 * 600.0);
    std::array<double, 3> c, sn;
    for (int k = 0; k < 3; ++k) {
        c[k] = std::cos(model.omega()[k] * dt);
        sn[k] = std::sin(model.omega()[k] * dt);
    }
    for (int atom = 0; atom < 5; ++atom) {
        AtomState s;
        model.thermal_position(rng, s);
        model.thermal_velocity(rng, s);
        const double e0 = model.energy(s);
        for (int k = 0; k < 24000; ++k) model.advance_harmonic(s, c, sn);
        EXPECT_LT(std::abs(model.energy(s) - e0) / e0, 1e-6);
    }
}

TEST(BathSimulator, GaussianTrapEnergyBounded) {
    TrapConfig trap;
    CrossedGaussian g;
    trap.shape = g;
    const TrapModel model(trap);
    CounterRng rng(5, 0);
    AtomState s;
    model.thermal_position(rng, s);
    model.thermal_velocity(rng, s);
    const double dt = 1.0 / (40.0 * 600.0), m = trap.atom_mass;
    const double e0 = model.energy(s);
    auto f = model.force(s.r);
    double worst = 0.0;
    for (int k = 0; k < 24000; ++k) {
        for (int d = 0; d < 3; ++d) {
            s.v[d] += 0.5 * dt * f[d] / m;
            s.r[d] += dt * s.v[d];
        }
        f = model.force(s.r);
        for (int d = 0; d < 3; ++d) s.v[d] += 0.5 * dt * f[d] / m;
        worst = std::max(worst, std::abs(model.energy(s) - e0) / e0);
    }
    EXPECT_LT(worst, 0.05);
}

TEST(BathSimulator, EquipartitionTemperature) {
    TrapConfig trap;
    BathSimulator bath(trap, CollisionConfig{}, settings(2000, 0.02));
    // Time-averaged potential of a harmonic atom is (3/2) kT.
    const double t_pot = bath.removed_offset() * si::hbar / trap.eta / (1.5 * si::boltzmann);
    EXPECT_NEAR(t_pot, trap.temperature, 0.05 * trap.temperature);

    BathSimulator hot(trap, CollisionConfig{2000.0, 0.0}, settings(20, 0.05));
    double v2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < 20; ++i)
        for (double v : hot.collision_speeds(i)) {
            v2 += v * v;
            ++n;
        }
    ASSERT_GT(n, 1500u);
    const double t_kin = trap.atom_mass * v2 / static_cast<double>(n) / (3.0 * si::boltzmann);
    EXPECT_NEAR(t_kin, trap.temperature, 0.05 * trap.temperature);
}

TEST(BathSimulator, CollisionSpeedsAreMaxwellian) {
    TrapConfig trap;
    BathSimulator bath(trap, CollisionConfig{1000.0, 0.0}, settings(10, 1.0));
    std::vector<double> speeds;
    for (std::size_t i = 0; i < 10; ++i) {
        const auto s = bath.collision_speeds(i);
        speeds.insert(speeds.end(), s.begin(), s.end());
    }
    ASSERT_GT(speeds.size(), 9000u);
    const double a = bath.model().thermal_velocity_sigma();
    const double d = oracle::ks_statistic(speeds, [&](double v) { return oracle::maxwell_cdf(v, a); });
    EXPECT_GT(oracle::ks_pvalue(d, speeds.size()), 0.01);
}

TEST(BathSimulator, CenteredEnsembleHasZeroMean) {
    const auto e = simulate_trajectories(TrapConfig{}, CollisionConfig{50.0, 0.0}, settings(50, 0.2));
    double s = 0.0, s2 = 0.0;
    for (double x : e.data()) {
        s += x;
        s2 += x * x;
    }
    const double n = static_cast<double>(e.data().size());
    EXPECT_LT(std::abs(s / n), 3.0 * std::sqrt(s2 / n) / std::sqrt(n));
    EXPECT_GT(e.removed_offset(), 0.0);
}

TEST(BathSimulator, StationaryMoments) {
    const auto e = simulate_trajectories(TrapConfig{}, CollisionConfig{50.0, 0.0}, settings(200, 0.5));
    const std::size_t half = e.n_steps() / 2;
    std::vector<double> d1, d2;
    for (std::size_t i = 0; i < e.n_traces(); ++i) {
        const auto tr = e.trace(i);
        double m1 = 0, m2 = 0, q1 = 0, q2 = 0;
        for (std::size_t k = 0; k < half; ++k) {
            m1 += tr[k];
            q1 += tr[k] * tr[k];
            m2 += tr[half + k];
            q2 += tr[half + k] * tr[half + k];
        }
        d1.push_back((m1 - m2) / static_cast<double>(half));
        d2.push_back((q1 - q2) / static_cast<double>(half));
    }
    const auto a = mean_se(d1), b = mean_se(d2);
    EXPECT_LT(std::abs(a.mean), 3.0 * a.se);
    EXPECT_LT(std::abs(b.mean), 3.0 * b.se);
}

TEST(BathSimulator, DeterministicAcrossThreadCounts) {
    const auto a = simulate_trajectories(TrapConfig{}, CollisionConfig{100.0, 0.0}, settings(16, 0.05), 1);
    const auto b = simulate_trajectories(TrapConfig{}, CollisionConfig{100.0, 0.0}, settings(16, 0.05), 4);
    EXPECT_EQ(a.data(), b.data());
    EXPECT_EQ(a.removed_offset(), b.removed_offset());
    TrapConfig g;
    g.shape = CrossedGaussian{};
    const auto c = simulate_trajectories(g, CollisionConfig{100.0, 0.0}, settings(6, 0.02), 1);
    const auto d = simulate_trajectories(g, CollisionConfig{100.0, 0.0}, settings(6, 0.02), 3);
    EXPECT_EQ(c.data(), d.data());
}

TEST(BathSimulator, Preconditions) {
    SimulationSettings s = settings(1, 0.1);
    s.dt = 1.0 / (10.0 * 600.0);
    EXPECT_THROW(BathSimulator(TrapConfig{}, CollisionConfig{}, s), PreconditionViolation);
    EXPECT_THROW(BathSimulator(TrapConfig{}, CollisionConfig{}, settings(1, 0.0)), InvalidArgument);
    EXPECT_THROW(BathSimulator(TrapConfig{}, CollisionConfig{}, settings(0, 0.1)), InvalidArgument);
    EXPECT_THROW(BathSimulator(TrapConfig{}, CollisionConfig{-1.0, 0.0}, settings(1, 0.1)), InvalidArgument);
    TrapConfig bad;
    bad.temperature = 0.0;
    EXPECT_THROW(BathSimulator(bad, CollisionConfig{}, settings(1, 0.1)), InvalidArgument);
}

TEST(Welch, PoissonRedrawMatchesLorentzian) {
    const double sigma = 20.0, rate = 200.0, dt = 1e-4;
    PoissonRedrawNoise src(sigma, rate, NoiseGrid{64, 1u << 15, dt, 11});
    const auto est = estimate_spectrum(src);
    std::size_t inside = 0, total = 0;
    for (std::size_t k = 1; k < est.f.size() && est.f[k] < 1000.0; ++k) {
        ++total;
        if (std::abs(est.G[k] - ar1_psd(sigma, rate, dt, est.f[k])) < 3.0 * est.sigma[k]) ++inside;
        if (est.f[k] < 300.0) {
            const double lor = 2.0 * sigma * sigma * rate / (rate * rate + std::pow(2 * oracle::pi * est.f[k], 2));
            EXPECT_NEAR(est.G[k], lor, 4.0 * est.sigma[k] + 0.01 * lor) << est.f[k];
        }
    }
    EXPECT_GE(static_cast<double>(inside), 0.95 * static_cast<double>(total));
}

TEST(Welch, OrnsteinUhlenbeckMatchesAr1Spectrum) {
    const double sigma = 5.0, rate = 50.0, dt = 2e-4;
    OrnsteinUhlenbeckNoise src(sigma, rate, NoiseGrid{48, 1u << 14, dt, 12});
    const auto est = estimate_spectrum(src);
    std::size_t inside = 0, total = 0;
    for (std::size_t k = 1; k < est.f.size(); ++k) {
        ++total;
        if (std::abs(est.G[k] - ar1_psd(sigma, rate, dt, est.f[k])) < 3.0 * est.sigma[k]) ++inside;
    }
    EXPECT_GE(static_cast<double>(inside), 0.95 * static_cast<double>(total));
}

TEST(Welch, TotalPowerIsHalfTheVariance) {
    PoissonRedrawNoise src(20.0, 200.0, NoiseGrid{128, 1u << 15, 1e-4, 13});
    const auto est = estimate_spectrum(src);
    const double df = est.f[1] - est.f[0];
    double area = 0.0;
    for (std::size_t k = 0; k < est.f.size(); ++k)
        area += est.G[k] * df * ((k == 0 || k + 1 == est.f.size()) ? 0.5 : 1.0);
    EXPECT_NEAR(area, est.variance / 2.0, 0.02 * est.variance / 2.0);
    for (double g : est.G) EXPECT_GE(g, 0.0);
}

TEST(Welch, ConstantTraceHasNoPowerAwayFromZero) {
    const std::size_t n = 4096;
    DetuningEnsemble zero(1e-3, n, 2, std::vector<double>(2 * n, 0.0));
    for (double g : estimate_spectrum(zero).G) EXPECT_EQ(g, 0.0);
    DetuningEnsemble flat(1e-3, n, 2, std::vector<double>(2 * n, 3.0));
    const auto est = estimate_spectrum(flat);
    for (std::size_t k = 2; k < est.G.size(); ++k) EXPECT_LT(est.G[k], 1e-20 * est.G[0]);
}

TEST(Welch, ThreadCountDoesNotChangeEstimate) {
    PoissonRedrawNoise src(20.0, 200.0, NoiseGrid{9, 1u << 12, 1e-4, 14});
    const auto a = estimate_spectrum(src, {8, 1});
    const auto b = estimate_spectrum(src, {8, 3});
    EXPECT_EQ(a.G, b.G);
    EXPECT_EQ(a.sigma, b.sigma);
}

TEST(Welch, Preconditions) {
    ZeroNoise tiny(NoiseGrid{1, 20, 1e-3, 0});
    EXPECT_THROW(estimate_spectrum(tiny), PreconditionViolation);
    ZeroNoise short_run(NoiseGrid{1, 1000, 1e-3, 0});
    EXPECT_THROW(spectrum_from_traces(short_run, FrequencyGrid::log(1.0, 100.0, 10)), PreconditionViolation);
    EXPECT_NO_THROW(spectrum_from_traces(short_run, FrequencyGrid::log(10.0, 100.0, 10)));
}

TEST(Welch, MotionalPeakAtTwiceAxialFrequency) {
    BathSimulator bath(TrapConfig{}, CollisionConfig{20.0, 0.0}, settings(100, 0.5));
    const auto est = estimate_spectrum(bath);
    std::size_t best = 0;
    for (std::size_t k = 0; k < est.f.size(); ++k)
        if (est.f[k] > 200.0 && est.f[k] < 800.0 && (best == 0 || est.G[k] > est.G[best])) best = k;
    EXPECT_NEAR(est.f[best], 320.0, 0.15 * 320.0);
    const auto maxima = est.local_maxima();
    EXPECT_NE(std::find(maxima.begin(), maxima.end(), best), maxima.end());
}

TEST(Welch, CollisionalNarrowing) {
    const auto scan = collisional_narrowing_scan(TrapConfig{}, settings(60, 6.0), {0.0, 20.0, 40.0});
    ASSERT_EQ(scan.size(), 3u);
    EXPECT_GT(scan[0].g_zero, scan[1].g_zero);
    EXPECT_NEAR(scan[1].g_zero / scan[2].g_zero, 2.0, 0.5);
    EXPECT_THROW(collisional_narrowing_scan(TrapConfig{}, settings(1, 1.0), {1.0}), InvalidArgument);
}

TEST(Traces, BinaryRoundTrip) {
    const auto e = simulate_trajectories(TrapConfig{}, CollisionConfig{100.0, 0.0}, settings(3, 0.01));
    std::stringstream ss;
    write_traces(ss, e);
    const auto back = read_traces(ss);
    EXPECT_EQ(back.data(), e.data());
    EXPECT_EQ(back.dt(), e.dt());
    EXPECT_EQ(back.removed_offset(), e.removed_offset());
    std::stringstream bad("not a trace file\n");
    EXPECT_THROW(read_traces(bad), InvalidArgument);
}
