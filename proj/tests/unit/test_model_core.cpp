#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "ddspec/io.hpp"
#include "ddspec/waveform.hpp"
#include "support/oracles.hpp"

using namespace ddspec;

TEST(Cpmg, SinglePulseIsHahnEcho) {
    const auto t = cpmg_times(1, 1.0);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_DOUBLE_EQ(t[0], 0.5);
}

TEST(Cpmg, TwoPulses) {
    const auto t = cpmg_times(2, 1.0);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_DOUBLE_EQ(t[0], 0.25);
    EXPECT_DOUBLE_EQ(t[1], 0.75);
}

TEST(Cpmg, SixteenPulsesSpacing) {
    const auto t = cpmg_times(16, 1.0);
    ASSERT_EQ(t.size(), 16u);
    EXPECT_NEAR(t[0], 0.03125, 1e-15);
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] - t[i - 1], 0.0625, 1e-14);
}

TEST(Cpmg, RejectsBadArguments) {
    EXPECT_THROW(cpmg_times(0, 1.0), InvalidArgument);
    EXPECT_THROW(cpmg_times(3, 0.0), InvalidArgument);
    EXPECT_THROW(cpmg_times(3, -1.0), InvalidArgument);
}

TEST(Udd, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(udd_times(1, 1.0)[0], 0.5);
    const auto two = udd_times(2, 1.0);
    EXPECT_NEAR(two[0], 0.25, 1e-15);
    EXPECT_NEAR(two[1], 0.75, 1e-15);
    const auto three = udd_times(3, 1.0);
    EXPECT_NEAR(three[0], std::pow(std::sin(oracle::pi / 8), 2), 1e-15);
    EXPECT_NEAR(three[1], 0.5, 1e-15);
    EXPECT_NEAR(three[2], std::pow(std::sin(3 * oracle::pi / 8), 2), 1e-15);
    EXPECT_NEAR(three[0], 0.1464, 1e-4);
    EXPECT_NEAR(three[2], 0.8536, 1e-4);
    EXPECT_THROW(udd_times(0, 1.0), InvalidArgument);
}

TEST(Udd, EqualsCpmgForOneAndTwoPulses) {
    for (std::size_t n : {1u, 2u}) {
        const auto u = udd_times(n, 0.7);
        const auto c = cpmg_times(n, 0.7);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(u[i], c[i], 1e-12 * 0.7);
    }
}

TEST(Sequences, SymmetricAboutMidpoint) {
    const double T = 1.3;
    for (std::size_t n = 1; n <= 40; ++n) {
        for (const auto& t : {cpmg_times(n, T), udd_times(n, T)}) {
            for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(t[j] + t[n - 1 - j], T, 1e-12 * T);
            for (std::size_t j = 1; j < n; ++j) EXPECT_GT(t[j], t[j - 1]);
        }
    }
}

TEST(Cdd, OrderOneIsTwoPulses) {
    const auto t = cdd_times(1, 1.0);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_DOUBLE_EQ(t[0], 0.25);
    EXPECT_DOUBLE_EQ(t[1], 0.75);
}

TEST(Cdd, MatchesLiteralRecursion) {
    for (std::size_t order = 1; order <= 7; ++order) {
        const auto got = cdd_times(order, 2.0);
        const auto want = oracle::cdd_recursion(order + 1, 2.0);
        ASSERT_EQ(got.size(), want.size()) << "order " << order;
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
        EXPECT_EQ(got.size(), cdd_pulse_count(order));
    }
}

TEST(Cdd, OrderTwoTimes) {
    const auto t = cdd_times(2, 1.0);
    const std::vector<double> want{0.125, 0.375, 0.5, 0.625, 0.875};
    ASSERT_EQ(t.size(), want.size());
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_DOUBLE_EQ(t[i], want[i]);
}

TEST(Cdd, FiveAdmissibleCountsInExperimentalRange) {
    std::vector<std::size_t> counts;
    for (std::size_t order = 1; order <= 10; ++order) {
        const std::size_t n = cdd_times(order, 1.0).size();
        if (n >= 2 && n <= 64) counts.push_back(n);
    }
    EXPECT_EQ(counts, (std::vector<std::size_t>{2, 5, 10, 21, 42}));
}

TEST(Cdd, RegenerationIsBitIdentical) {
    const auto a = cdd_times(5, 0.4);
    const auto b = cdd_times(5, 0.4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
    EXPECT_THROW(cdd_times(0, 1.0), InvalidArgument);
    EXPECT_THROW(cdd_times(2, 0.0), InvalidArgument);
}

TEST(Phases, Patterns) {
    EXPECT_EQ(assign_phases(4, PhasePattern::AlternatePairs), (std::vector<double>{0, 0, kPi, kPi}));
    EXPECT_EQ(assign_phases(1, PhasePattern::AlternatePairs), (std::vector<double>{0}));
    EXPECT_EQ(assign_phases(5, PhasePattern::Uniform), (std::vector<double>(5, 0.0)));
    EXPECT_EQ(assign_phases(6, PhasePattern::AlternatePairs), (std::vector<double>{0, 0, kPi, kPi, 0, 0}));
}

TEST(AccumulatedPhase, ConstantDriveHalfCycle) {
    EXPECT_NEAR(accumulated_phase(ConstantDrive{100.0}, 0.005), kPi, 1e-12);
}

TEST(AccumulatedPhase, IdealPulseTrainSteps) {
    const ControlWaveform w = make_pulse_train({0.5}, 1.0);
    EXPECT_DOUBLE_EQ(accumulated_phase(w, 0.6), kPi);
    EXPECT_DOUBLE_EQ(accumulated_phase(w, 0.4), 0.0);
    EXPECT_THROW(accumulated_phase(w, 1.5), InvalidArgument);
    EXPECT_THROW(accumulated_phase(w, -0.1), InvalidArgument);
}

TEST(AccumulatedPhase, SidebandClosedForm) {
    const SidebandDrive d{200.0, 0.5, 20.0};
    for (double t : {0.0, 0.013, 0.1, 0.77}) {
        const double want = 2 * oracle::pi * 200.0 * t + 0.5 * std::sin(2 * oracle::pi * 20.0 * t);
        EXPECT_NEAR(accumulated_phase(d, t), want, 1e-9);
    }
}

TEST(AccumulatedPhase, SampledMatchesNumericIntegralAndIsMonotone) {
    const Sampled s({0.0, 0.1, 0.3, 0.4}, {0.0, 20.0, 5.0, 0.0});
    const ControlWaveform w = s;
    const double exact = oracle::simpson([&](double t) { return s.omega_at(t); }, 0.0, 0.4, 40000);
    EXPECT_NEAR(accumulated_phase(w, 0.4), exact, 1e-9);
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
        const double v = accumulated_phase(w, 0.001 * i);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(AccumulatedPhase, TriangularRampsCarryPiArea) {
    const auto train = make_sequence({SequenceKind::CPMG, 4, 1, 1.0, PhasePattern::Uniform});
    const auto s = to_sampled(train, 0.01);
    const ControlWaveform w = s;
    EXPECT_NEAR(accumulated_phase(w, 1.0), 4 * kPi, 1e-12);
    EXPECT_NEAR(accumulated_phase(w, 0.5), 2 * kPi, 1e-12);
}

TEST(Waveform, ValidationRejectsBadFields) {
    EXPECT_THROW(validate(ControlWaveform{ConstantDrive{0.0}}), InvalidArgument);
    EXPECT_THROW(validate(ControlWaveform{SidebandDrive{100.0, -0.1, 10.0}}), InvalidArgument);
    EXPECT_THROW(validate(ControlWaveform{SidebandDrive{100.0, 0.1, 0.0}}), InvalidArgument);
    PulseTrain p;
    p.times = {0.3, 0.2};
    p.phases = {0, 0};
    p.total_time = 1.0;
    EXPECT_THROW(validate(p), InvalidArgument);
    p.times = {0.2, 0.3};
    p.phases = {0};
    EXPECT_THROW(validate(p), InvalidArgument);
}

TEST(ExperimentConfig, Validation) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_DOUBLE_EQ(c.alpha, 0.25);
    c.alpha = 0.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.alpha = 1.0;
    c.t1_time = -1.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(SequenceSpecJson, RoundTrip) {
    for (const SequenceSpec s : {SequenceSpec{SequenceKind::CPMG, 16, 1, 1.0, PhasePattern::AlternatePairs},
                                 SequenceSpec{SequenceKind::UDD, 8, 1, 0.4, PhasePattern::Uniform},
                                 SequenceSpec{SequenceKind::CDD, 1, 3, 0.4, PhasePattern::Uniform}}) {
        const auto back = sequence_from_json(nlohmann::json::parse(to_json(s).dump()));
        EXPECT_EQ(back.kind, s.kind);
        EXPECT_EQ(back.total_time, s.total_time);
        EXPECT_EQ(back.phase_pattern, s.phase_pattern);
        EXPECT_EQ(make_sequence(back).times, make_sequence(s).times);
    }
    EXPECT_THROW(sequence_from_json(nlohmann::json::parse(R"({"kind":"XY8","n_pulses":4,"total_time_s":1})")),
                 InvalidArgument);
    EXPECT_THROW(sequence_from_json(nlohmann::json::parse(R"({"kind":"CPMG","n_pulses":0,"total_time_s":1})")),
                 InvalidArgument);
}
