#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pathsig/witness.hpp"

using namespace pathsig;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Runs {
    Ensemble e12, e13, e123;
};

Runs runs_at(double tau, double T) {
    return {real_ensemble(rabi_qubit_schedule(tau, T, {true, true, false})),
            real_ensemble(rabi_qubit_schedule(tau, T, {true, false, true})),
            real_ensemble(rabi_qubit_schedule(tau, T, {true, true, true}))};
}

} // namespace

TEST_CASE("pair correlators take their closed forms", "[witness]") {
    std::mt19937_64 rng(79);
    for (int i = 0; i < 50; ++i) {
        const double a = testutil::uniform(rng, 0.0, 2.0 * kPi);
        const double b = testutil::uniform(rng, 0.0, 2.0 * kPi);
        const double tau = std::min(a, b), T = std::max(a, b);
        const Runs r = runs_at(tau, T);
        const CorrelatorSet c = correlators_from_ensembles(r.e12, r.e13, r.e123);
        const std::array<double, 3> closed = testutil::correlators_closed(tau, T);
        REQUIRE_THAT(c.alpha, WithinAbs(closed[0], 1e-12));
        REQUIRE_THAT(c.beta, WithinAbs(closed[1], 1e-12));
        REQUIRE_THAT(c.gamma, WithinAbs(closed[2], 1e-12));
    }
    const Runs r = runs_at(kPi / 3.0, 2.0 * kPi / 3.0);
    const CorrelatorSet c = correlators_from_ensembles(r.e12, r.e13, r.e123);
    REQUIRE_THAT(c.alpha, WithinAbs(-0.5, 1e-12));
    REQUIRE_THAT(c.beta, WithinAbs(-0.5, 1e-12));
    REQUIRE_THAT(c.gamma, WithinAbs(-0.5, 1e-12));
}

TEST_CASE("correlator extraction validates its inputs", "[witness]") {
    const Runs r = runs_at(0.4, 1.3);
    REQUIRE_THROWS_AS(correlators_from_ensembles(r.e13, r.e13, r.e13), DimensionMismatch);

    // eigenvalues ±2 are dichotomic in count but not in value
    const Observable doubled = Observable::from_hermitian(
        Matrix(2, {Complex{2.0, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{-2.0, 0.0}}));
    std::vector<MeasurementSlot> slots{{0.0, doubled, true}, {0.4, doubled, true}, {1.3, doubled, true}};
    const MeasurementSchedule s(Vector::basis(2, 0), slots,
                                {rabi_unitary(0.0), rabi_unitary(0.4), rabi_unitary(0.9)});
    const Ensemble e123 = real_ensemble(s);
    const Ensemble e12 = real_ensemble(s.with_measured_mask({true, true, false}));
    const Ensemble e13 = real_ensemble(s.with_measured_mask({true, false, true}));
    REQUIRE_THROWS_AS(correlators_from_ensembles(e12, e13, e123), EigenvalueNotPlusMinusOne);
}

TEST_CASE("quasi-probability solve at the deep-violation point", "[witness]") {
    const Runs r = runs_at(kPi / 3.0, 2.0 * kPi / 3.0);
    const QuasiProbs q = solve_quasiprobs(correlators_from_ensembles(r.e12, r.e13, r.e123));
    REQUIRE_THAT(q.p[0], WithinAbs(-0.125, 1e-12));
    REQUIRE_THAT(q.p[1], WithinAbs(0.375, 1e-12));
    REQUIRE_THAT(q.p[2], WithinAbs(0.375, 1e-12));
    REQUIRE_THAT(q.p[3], WithinAbs(0.375, 1e-12));
    REQUIRE_THAT(q.delta_p, WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(lgi_witness(correlators_from_ensembles(r.e12, r.e13, r.e123)),
                 WithinAbs(-0.5, 1e-12));
}

TEST_CASE("quasi-probability solve at the spurious point", "[witness]") {
    // nonzero signalling shift, yet a genuine (nonnegative) solution exists
    const Runs r = runs_at(kPi / 8.0, kPi / 2.0);
    const QuasiProbs q = solve_quasiprobs(correlators_from_ensembles(r.e12, r.e13, r.e123));
    const double s2 = std::sqrt(2.0);
    REQUIRE_THAT(q.p[0], WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(q.p[1], WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(q.p[2], WithinAbs((2.0 + s2) / 4.0, 1e-12));
    REQUIRE_THAT(q.p[3], WithinAbs((2.0 - s2) / 4.0, 1e-12));
    REQUIRE_THAT(q.delta_p, WithinAbs(0.0, 1e-12));
}

TEST_CASE("quasi-probabilities always sum to one and the witness is their overshoot", "[witness]") {
    std::mt19937_64 rng(83);
    for (int i = 0; i < 1000; ++i) {
        CorrelatorSet c;
        c.alpha = testutil::uniform(rng, -1.0, 1.0);
        c.beta = testutil::uniform(rng, -1.0, 1.0);
        c.gamma = testutil::uniform(rng, -1.0, 1.0);
        const QuasiProbs q = solve_quasiprobs(c);
        REQUIRE_THAT(q.p[0] + q.p[1] + q.p[2] + q.p[3], WithinAbs(1.0, 1e-15));
        REQUIRE(q.delta_p >= 0.0);
        REQUIRE_THAT(lgi_witness(c), WithinAbs(4.0 * q.p[0], 1e-14));
        // reconstruct the correlators from the solution: the system is exactly inverted
        REQUIRE_THAT(q.p[0] - q.p[1] + q.p[2] - q.p[3], WithinAbs(c.alpha, 1e-14));
        REQUIRE_THAT(q.p[0] + q.p[1] - q.p[2] - q.p[3], WithinAbs(c.beta, 1e-14));
        REQUIRE_THAT(q.p[0] - q.p[1] - q.p[2] + q.p[3], WithinAbs(c.gamma, 1e-14));
    }
    CorrelatorSet out_of_range;
    out_of_range.alpha = 1.1;
    REQUIRE_THROWS_AS(solve_quasiprobs(out_of_range), InvalidRange);
}

TEST_CASE("preexistence feasibility tracks the signalling shift", "[witness]") {
    SECTION("infeasible at the maximal-shift point") {
        const Runs r = runs_at(kPi / 4.0, kPi / 2.0);
        const PreexistenceReport report = preexistence_check(r.e123, r.e13, r.e12);
        REQUIRE(!report.feasible);
        // grouped three-slot weights overshoot the final-slot marginal by the shift
        REQUIRE_THAT(report.final_slot_residuals[0], WithinAbs(0.5, 1e-12));
        REQUIRE_THAT(report.final_slot_residuals[1], WithinAbs(-0.5, 1e-12));
        REQUIRE_THAT(report.middle_slot_residuals[0], WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(report.middle_slot_residuals[1], WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(report.p[0] + report.p[1] + report.p[2] + report.p[3],
                     WithinAbs(1.0, 1e-12));
    }
    SECTION("feasible where the shift vanishes") {
        const Runs r = runs_at(kPi / 2.0, kPi);
        REQUIRE(preexistence_check(r.e123, r.e13, r.e12).feasible);
    }
    SECTION("the middle-slot constraints hold identically") {
        std::mt19937_64 rng(89);
        for (int i = 0; i < 25; ++i) {
            const double a = testutil::uniform(rng, 0.0, 2.0 * kPi);
            const double b = testutil::uniform(rng, 0.0, 2.0 * kPi);
            const double tau = std::min(a, b), T = std::max(a, b);
            const Runs r = runs_at(tau, T);
            const PreexistenceReport report = preexistence_check(r.e123, r.e13, r.e12);
            REQUIRE_THAT(report.middle_slot_residuals[0], WithinAbs(0.0, 1e-12));
            REQUIRE_THAT(report.middle_slot_residuals[1], WithinAbs(0.0, 1e-12));
            const double shift = testutil::delta_P_closed(tau, T);
            REQUIRE_THAT(report.final_slot_residuals[0], WithinAbs(shift, 1e-12));
            REQUIRE(report.feasible == (std::abs(shift) <= 1e-9));
        }
    }
    SECTION("input validation") {
        const Runs r = runs_at(0.4, 1.3);
        REQUIRE_THROWS_AS(preexistence_check(r.e12, r.e13, r.e12), DimensionMismatch);
    }
}

TEST_CASE("regime classification at the reference points", "[witness]") {
    REQUIRE(classify(kPi / 2.0, kPi) == Regime::ClassicalDeterministic);
    REQUIRE(classify(kPi / 2.0, 3.0 * kPi / 4.0) == Regime::ClassicalStochastic);
    REQUIRE(classify(kPi / 4.0, kPi / 2.0) == Regime::QuantumStochastic);
    // zero-length first interval: no shift, two live records
    REQUIRE(classify(0.0, 1.1) == Regime::ClassicalStochastic);
    // the tolerance decides what counts as a live record
    REQUIRE(classify(0.02, 0.04) == Regime::QuantumStochastic);
    REQUIRE(classify(0.02, 0.04, 1e-2) == Regime::ClassicalDeterministic);

    REQUIRE(to_string(Regime::QuantumStochastic) == "QuantumStochastic");
    REQUIRE(to_string(Regime::ClassicalStochastic) == "ClassicalStochastic");
    REQUIRE(to_string(Regime::ClassicalDeterministic) == "ClassicalDeterministic");
}

TEST_CASE("witness reports are internally consistent", "[witness]") {
    std::mt19937_64 rng(97);
    for (int i = 0; i < 25; ++i) {
        const double a = testutil::uniform(rng, 0.0, 2.0 * kPi);
        const double b = testutil::uniform(rng, 0.0, 2.0 * kPi);
        const double tau = std::min(a, b), T = std::max(a, b);
        const WitnessReport report = witness_report(tau, T);

        REQUIRE(report.tau == tau);
        REQUIRE(report.T == T);
        REQUIRE_THAT(report.delta_P, WithinAbs(testutil::delta_P_closed(tau, T), 1e-12));
        REQUIRE_THAT(report.delta_L, WithinAbs(lgi_witness(report.correlators), 1e-15));
        const QuasiProbs q = solve_quasiprobs(report.correlators);
        for (int k = 0; k < 4; ++k) REQUIRE(report.quasi.p[k] == q.p[k]);
        REQUIRE(report.regime == classify(tau, T));
        REQUIRE(report.signalling_detected == (std::abs(report.delta_P) > 1e-9));
        REQUIRE(report.negativity_detected == (report.quasi.delta_p > 1e-9));
        REQUIRE(report.lgi_violated == (report.delta_L < -1e-9));
        if (report.lgi_violated) REQUIRE(report.negativity_detected);
        if (report.negativity_detected) REQUIRE(report.signalling_detected);
    }
}

TEST_CASE("witness report at the deep-violation point sets every flag", "[witness]") {
    const WitnessReport report = witness_report(kPi / 3.0, 2.0 * kPi / 3.0);
    REQUIRE(report.lgi_violated);
    REQUIRE(report.negativity_detected);
    REQUIRE(report.signalling_detected);
    REQUIRE(report.regime == Regime::QuantumStochastic);
    REQUIRE_THAT(report.delta_L, WithinAbs(-0.5, 1e-12));
    REQUIRE_THAT(report.quasi.delta_p, WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(report.delta_P, WithinAbs(0.375, 1e-12));
}

TEST_CASE("witness report flags at quiet points", "[witness]") {
    const WitnessReport still = witness_report(kPi / 2.0, kPi);
    REQUIRE(!still.lgi_violated);
    REQUIRE(!still.negativity_detected);
    REQUIRE(!still.signalling_detected);
    REQUIRE(still.regime == Regime::ClassicalDeterministic);

    // signalling without negativity: the one-sided witness stays quiet
    const WitnessReport spurious = witness_report(kPi / 8.0, kPi / 2.0);
    REQUIRE(spurious.signalling_detected);
    REQUIRE(!spurious.negativity_detected);
    REQUIRE(!spurious.lgi_violated);
}
