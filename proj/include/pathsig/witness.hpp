#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pathsig/common.hpp"
#include "pathsig/ensemble.hpp"
#include "pathsig/pathspace.hpp"

namespace pathsig {

/// The three pair correlators of ±1 outcomes at times 0, τ and T:
/// alpha = ⟨Q(τ)Q(0)⟩, beta = ⟨Q(T)Q(0)⟩, gamma = ⟨Q(T)Q(τ)⟩, each taken from
/// the run that measures exactly that pair (plus the non-perturbing t = 0 slot).
struct CorrelatorSet {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

/// Joint distribution over the four outcome records (q2, q3) ∈ {+,−}² that
/// reproduces the three correlators, with the first outcome pinned to +1.
/// Entries may be negative; delta_p = Σ|p| − 1 (clamped at 0) measures by how
/// much, and is zero exactly when a genuine distribution does the job.
struct QuasiProbs {
    std::array<double, 4> p{}; // order: (++), (−+), (+−), (−−) for (q2, q3)
    double delta_p = 0.0;
};

enum class Regime {
    QuantumStochastic,      // hidden intermediate measurement shifts later statistics
    ClassicalStochastic,    // several live paths, but no such shift
    ClassicalDeterministic, // a single path carries all probability
};

inline std::string to_string(Regime regime) {
    switch (regime) {
    case Regime::QuantumStochastic: return "QuantumStochastic";
    case Regime::ClassicalStochastic: return "ClassicalStochastic";
    case Regime::ClassicalDeterministic: return "ClassicalDeterministic";
    }
    throw Error("to_string: unknown regime");
}

namespace detail {

inline void require_dichotomic_units(const Ensemble& ensemble, const Tolerances& tol) {
    for (const std::vector<double>& eigenvalues : ensemble.outcome_eigenvalues) {
        if (eigenvalues.size() != 2 || std::abs(eigenvalues[0] - 1.0) > tol.equality ||
            std::abs(eigenvalues[1] + 1.0) > tol.equality)
            throw EigenvalueNotPlusMinusOne(
                "correlators need two-outcome slots with eigenvalues +1 and -1");
    }
}

/// Probability of an exact outcome record; absent rows are exact zeros.
inline double probability_of(const Ensemble& ensemble, const std::vector<int>& record) {
    for (const RealPath& path : ensemble.paths)
        if (path.outcomes == record) return path.probability;
    return 0.0;
}

} // namespace detail

/// Extract (alpha, beta, gamma) from the three runs: e12 measures slots {0, τ},
/// e13 measures {0, T}, e123 measures all three. beta deliberately comes from
/// the run without the middle measurement.
inline CorrelatorSet correlators_from_ensembles(const Ensemble& e12, const Ensemble& e13,
                                                const Ensemble& e123,
                                                const Tolerances& tol = kDefaultTolerances) {
    if (e12.measured_count() != 2 || e13.measured_count() != 2 || e123.measured_count() != 3)
        throw DimensionMismatch("correlators_from_ensembles: expected 2, 2 and 3 measured slots");
    detail::require_dichotomic_units(e12, tol);
    detail::require_dichotomic_units(e13, tol);
    detail::require_dichotomic_units(e123, tol);

    CorrelatorSet c;
    c.alpha = two_time_correlator(e12, e12.measured_slots[0], e12.measured_slots[1]);
    c.beta = two_time_correlator(e13, e13.measured_slots[0], e13.measured_slots[1]);
    c.gamma = two_time_correlator(e123, e123.measured_slots[1], e123.measured_slots[2]);
    return c;
}

/// Invert the linear system tying the four record weights to the correlators.
/// With the first outcome pinned at +1 the solution is unique:
///   p(++) = (1 + alpha + beta + gamma)/4,  p(−+) = (1 − alpha + beta − gamma)/4,
///   p(+−) = (1 + alpha − beta − gamma)/4,  p(−−) = (1 − alpha − beta + gamma)/4.
inline QuasiProbs solve_quasiprobs(const CorrelatorSet& c, const Tolerances& tol = kDefaultTolerances) {
    const double limit = 1.0 + tol.equality;
    if (std::abs(c.alpha) > limit || std::abs(c.beta) > limit || std::abs(c.gamma) > limit)
        throw InvalidRange("solve_quasiprobs: correlators must lie in [-1, 1]");

    QuasiProbs q;
    q.p[0] = 0.25 * (1.0 + c.alpha + c.beta + c.gamma);
    q.p[1] = 0.25 * (1.0 - c.alpha + c.beta - c.gamma);
    q.p[2] = 0.25 * (1.0 + c.alpha - c.beta - c.gamma);
    q.p[3] = 0.25 * (1.0 - c.alpha - c.beta + c.gamma);

    double l1 = 0.0;
    for (double value : q.p) l1 += std::abs(value);
    q.delta_p = std::max(0.0, l1 - 1.0);
    return q;
}

/// Two-sided bound obeyed by any fixed-outcome model: for ±1 variables,
/// 1 + alpha + beta + gamma ≥ 0 record by record, so a negative value witnesses
/// that no such model reproduces the correlators. Equals 4·p(++).
inline double lgi_witness(const CorrelatorSet& c) { return 1.0 + c.alpha + c.beta + c.gamma; }

/// Can the fully measured run's path weights also reproduce both two-slot runs?
/// Residuals compare grouped three-slot probabilities against the directly
/// measured two-slot marginals at the final (T) and middle (τ) slots.
struct PreexistenceReport {
    std::array<double, 4> p{};                    // records (++), (−+), (+−), (−−) for (q2, q3)
    std::array<double, 2> final_slot_residuals{}; // grouped − measured, outcomes +1 and −1 at T
    std::array<double, 2> middle_slot_residuals{};
    bool feasible = false;
};

inline PreexistenceReport preexistence_check(const Ensemble& e123, const Ensemble& e13,
                                             const Ensemble& e12,
                                             double tol = kDefaultTolerances.zero) {
    if (e12.measured_count() != 2 || e13.measured_count() != 2 || e123.measured_count() != 3)
        throw DimensionMismatch("preexistence_check: expected 3, 2 and 2 measured slots");
    const Tolerances tolerances;
    detail::require_dichotomic_units(e12, tolerances);
    detail::require_dichotomic_units(e13, tolerances);
    detail::require_dichotomic_units(e123, tolerances);
    if (std::abs(marginal_probability(e123, e123.measured_slots[0], 0) - 1.0) > tol)
        throw Error("preexistence_check: first outcome must be pinned to +1");

    PreexistenceReport report;
    report.p[0] = detail::probability_of(e123, {0, 0, 0});
    report.p[1] = detail::probability_of(e123, {0, 1, 0});
    report.p[2] = detail::probability_of(e123, {0, 0, 1});
    report.p[3] = detail::probability_of(e123, {0, 1, 1});

    report.final_slot_residuals[0] =
        (report.p[0] + report.p[1]) - detail::probability_of(e13, {0, 0});
    report.final_slot_residuals[1] =
        (report.p[2] + report.p[3]) - detail::probability_of(e13, {0, 1});
    report.middle_slot_residuals[0] =
        (report.p[0] + report.p[2]) - detail::probability_of(e12, {0, 0});
    report.middle_slot_residuals[1] =
        (report.p[1] + report.p[3]) - detail::probability_of(e12, {0, 1});

    report.feasible = true;
    for (double r : report.final_slot_residuals) report.feasible &= std::abs(r) <= tol;
    for (double r : report.middle_slot_residuals) report.feasible &= std::abs(r) <= tol;
    return report;
}

namespace detail {

inline Regime classify_from(double delta_P, const Ensemble& e123, double tol) {
    if (std::abs(delta_P) > tol) return Regime::QuantumStochastic;
    int live = 0;
    for (const RealPath& path : e123.paths) live += path.probability > tol ? 1 : 0;
    return live >= 2 ? Regime::ClassicalStochastic : Regime::ClassicalDeterministic;
}

} // namespace detail

/// Everything the scan records about one (τ, T) point of the flip-dynamics qubit.
struct WitnessReport {
    double tau = 0.0;
    double T = 0.0;
    double delta_P = 0.0; // shift of P(Q(T) = +1) caused by measuring at τ
    CorrelatorSet correlators;
    QuasiProbs quasi;
    double delta_L = 0.0; // 1 + alpha + beta + gamma, negative ⇒ bound violated
    Regime regime = Regime::ClassicalDeterministic;
    bool lgi_violated = false;
    bool negativity_detected = false;
    bool signalling_detected = false;
};

inline WitnessReport witness_report(double tau, double T,
                                    const Tolerances& tol = kDefaultTolerances) {
    const Ensemble e12 = real_ensemble(rabi_qubit_schedule(tau, T, {true, true, false}));
    const Ensemble e13 = real_ensemble(rabi_qubit_schedule(tau, T, {true, false, true}));
    const Ensemble e123 = real_ensemble(rabi_qubit_schedule(tau, T, {true, true, true}));

    WitnessReport report;
    report.tau = tau;
    report.T = T;
    report.delta_P = marginal_probability(e123, 2, 0) - marginal_probability(e13, 2, 0);
    report.correlators = correlators_from_ensembles(e12, e13, e123, tol);
    report.quasi = solve_quasiprobs(report.correlators, tol);
    report.delta_L = lgi_witness(report.correlators);
    report.regime = detail::classify_from(report.delta_P, e123, tol.zero);
    report.lgi_violated = report.delta_L < -tol.zero;
    report.negativity_detected = report.quasi.delta_p > tol.zero;
    report.signalling_detected = std::abs(report.delta_P) > tol.zero;
    return report;
}

/// Regime of one (τ, T) point: does a hidden measurement at τ shift the T
/// statistics, and if not, how many live paths remain?
inline Regime classify(double tau, double T, double tol = kDefaultTolerances.zero) {
    const Ensemble e13 = real_ensemble(rabi_qubit_schedule(tau, T, {true, false, true}));
    const Ensemble e123 = real_ensemble(rabi_qubit_schedule(tau, T, {true, true, true}));
    const double delta_P = marginal_probability(e123, 2, 0) - marginal_probability(e13, 2, 0);
    return detail::classify_from(delta_P, e123, tol);
}

} // namespace pathsig
