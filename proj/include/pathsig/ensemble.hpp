#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "pathsig/common.hpp"
#include "pathsig/linalg.hpp"
#include "pathsig/pathspace.hpp"

namespace pathsig {

/// One outcome sequence over the measured slots only (chronological order,
/// index 0 = largest eigenvalue) and the probability of recording it.
struct RealPath {
    std::vector<int> outcomes;
    double probability = 0.0;
};

/// The statistics a run of the schedule actually produces: every outcome record
/// that occurs with nonzero probability, plus enough bookkeeping to map record
/// entries back to slots and eigenvalues. Paths are in lexicographic outcome
/// order; rows whose probability is exactly zero are omitted.
struct Ensemble {
    std::vector<bool> measured_mask;                       // one flag per schedule slot
    std::vector<std::size_t> measured_slots;               // slot indices with the flag set
    std::vector<std::vector<double>> outcome_eigenvalues;  // per measured slot, by outcome index
    std::vector<RealPath> paths;

    std::size_t measured_count() const { return measured_slots.size(); }

    /// Position of a schedule slot within the measured-slot record.
    std::size_t measured_position(std::size_t slot_index) const {
        for (std::size_t pos = 0; pos < measured_slots.size(); ++pos)
            if (measured_slots[pos] == slot_index) return pos;
        throw SlotNotMeasured("measured_position: slot " + std::to_string(slot_index) +
                              " is not measured in this ensemble");
    }

    double total_probability() const {
        double sum = 0.0;
        for (const RealPath& path : paths) sum += path.probability;
        return sum;
    }
};

/// Build the real ensemble of a schedule. Unmeasured interior slots contribute
/// coherently (their outcome branches are summed at the amplitude level, i.e.
/// not branched at all); measured slots branch, and the recorded probability is
/// the squared norm of the fully projected chain. Slots after the last measured
/// one cannot affect the record and are skipped.
inline Ensemble real_ensemble(const MeasurementSchedule& schedule) {
    const std::vector<bool> mask = schedule.measured_mask();
    std::size_t last = schedule.slot_count();
    for (std::size_t k = schedule.slot_count(); k-- > 0;) {
        if (mask[k]) {
            last = k;
            break;
        }
    }
    if (last == schedule.slot_count()) throw NoMeasuredSlots("real_ensemble: no slot is measured");

    Ensemble ensemble;
    ensemble.measured_mask = mask;
    for (std::size_t k = 0; k < schedule.slot_count(); ++k) {
        if (!mask[k]) continue;
        ensemble.measured_slots.push_back(k);
        const Observable& obs = schedule.slot(k).observable;
        std::vector<double> eigenvalues;
        eigenvalues.reserve(static_cast<std::size_t>(obs.outcome_count()));
        for (int q = 0; q < obs.outcome_count(); ++q) eigenvalues.push_back(obs.eigenvalue(q));
        ensemble.outcome_eigenvalues.push_back(std::move(eigenvalues));
    }

    std::vector<int> record;
    record.reserve(ensemble.measured_count());
    auto walk = [&](auto&& self, std::size_t k, const Vector& state) -> void {
        const Vector evolved = schedule.propagator(k) * state;
        if (!mask[k]) {
            self(self, k + 1, evolved);
            return;
        }
        const Observable& obs = schedule.slot(k).observable;
        for (int q = 0; q < obs.outcome_count(); ++q) {
            const Vector projected = obs.project(q, evolved);
            record.push_back(q);
            if (k == last) {
                const double probability = projected.squared_norm();
                if (probability != 0.0) ensemble.paths.push_back({record, probability});
            } else {
                self(self, k + 1, projected);
            }
            record.pop_back();
        }
    };
    walk(walk, 0, schedule.initial_state());
    return ensemble;
}

/// Probability that the measured slot `slot_index` recorded outcome `outcome`.
inline double marginal_probability(const Ensemble& ensemble, std::size_t slot_index, int outcome) {
    const std::size_t pos = ensemble.measured_position(slot_index);
    if (outcome < 0 || static_cast<std::size_t>(outcome) >= ensemble.outcome_eigenvalues[pos].size())
        throw BadSlotIndex("marginal_probability: outcome index out of range");
    double sum = 0.0;
    for (const RealPath& path : ensemble.paths)
        if (path.outcomes[pos] == outcome) sum += path.probability;
    return sum;
}

/// Drop a measured slot from the record by summing probabilities over its
/// outcomes. This is discarding data, not undoing the measurement: the slot's
/// back-action on the remaining statistics stays in place.
inline Ensemble marginalize(const Ensemble& ensemble, std::size_t slot_index) {
    const std::size_t pos = ensemble.measured_position(slot_index);

    Ensemble reduced;
    reduced.measured_mask = ensemble.measured_mask;
    reduced.measured_mask[slot_index] = false;
    for (std::size_t p = 0; p < ensemble.measured_count(); ++p) {
        if (p == pos) continue;
        reduced.measured_slots.push_back(ensemble.measured_slots[p]);
        reduced.outcome_eigenvalues.push_back(ensemble.outcome_eigenvalues[p]);
    }

    std::map<std::vector<int>, double> accumulated;
    for (const RealPath& path : ensemble.paths) {
        std::vector<int> key;
        key.reserve(path.outcomes.size() - 1);
        for (std::size_t p = 0; p < path.outcomes.size(); ++p)
            if (p != pos) key.push_back(path.outcomes[p]);
        accumulated[std::move(key)] += path.probability;
    }
    for (auto& [outcomes, probability] : accumulated) reduced.paths.push_back({outcomes, probability});
    return reduced;
}

/// ⟨Q_a Q_b⟩: expectation of the product of the recorded eigenvalues at two
/// measured slots.
inline double two_time_correlator(const Ensemble& ensemble, std::size_t slot_a, std::size_t slot_b) {
    const std::size_t pos_a = ensemble.measured_position(slot_a);
    const std::size_t pos_b = ensemble.measured_position(slot_b);
    double sum = 0.0;
    for (const RealPath& path : ensemble.paths)
        sum += ensemble.outcome_eigenvalues[pos_a][static_cast<std::size_t>(path.outcomes[pos_a])] *
               ensemble.outcome_eigenvalues[pos_b][static_cast<std::size_t>(path.outcomes[pos_b])] *
               path.probability;
    return sum;
}

namespace detail {

/// The last slot that stays measured when `middle_slot` is toggled; the probe
/// whose statistics a hidden intermediate measurement is not supposed to move.
inline std::size_t signalling_probe_slot(const MeasurementSchedule& schedule, std::size_t middle_slot) {
    if (middle_slot >= schedule.slot_count())
        throw BadSlotIndex("signalling: middle slot index out of range");
    for (std::size_t k = schedule.slot_count(); k-- > middle_slot + 1;)
        if (schedule.slot(k).measured) return k;
    throw BadSlotIndex("signalling: no measured slot after the toggled one");
}

} // namespace detail

/// Shift in the probability of recording `probe_outcome` at the last measured
/// slot when the measurement at `middle_slot` is switched on versus off. Zero
/// for any classical stochastic process; generally nonzero here.
inline double signalling_delta(const MeasurementSchedule& schedule, std::size_t middle_slot,
                               int probe_outcome) {
    const std::size_t probe = detail::signalling_probe_slot(schedule, middle_slot);
    std::vector<bool> mask = schedule.measured_mask();
    mask[middle_slot] = true;
    const Ensemble with = real_ensemble(schedule.with_measured_mask(mask));
    mask[middle_slot] = false;
    const Ensemble without = real_ensemble(schedule.with_measured_mask(mask));
    return marginal_probability(with, probe, probe_outcome) -
           marginal_probability(without, probe, probe_outcome);
}

/// Total variation distance between the probe slot's outcome distributions with
/// and without the measurement at `middle_slot`: ½ Σ_q |ΔP(q)|.
inline double signalling_total_variation(const MeasurementSchedule& schedule, std::size_t middle_slot) {
    const std::size_t probe = detail::signalling_probe_slot(schedule, middle_slot);
    const int outcomes = schedule.slot(probe).observable.outcome_count();
    double sum = 0.0;
    for (int q = 0; q < outcomes; ++q) sum += std::abs(signalling_delta(schedule, middle_slot, q));
    return 0.5 * sum;
}

} // namespace pathsig
