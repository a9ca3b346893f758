#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pathsig/common.hpp"
#include "pathsig/linalg.hpp"

namespace pathsig {

struct MeasurementSlot {
    double time = 0.0; // dimensionless, unit-frequency time
    Observable observable;
    bool measured = true;
};

/// An initial state, an ordered list of measurement slots, and one propagator per
/// inter-slot interval. propagator(0) evolves from t = 0 to the first slot's time,
/// so a slot at t = 0 carries the identity. Slot times may coincide (zero-length
/// intervals are allowed and get identity propagators when generated from a
/// Hamiltonian).
class MeasurementSchedule {
public:
    MeasurementSchedule(Vector initial_state, std::vector<MeasurementSlot> slots,
                        std::vector<UnitaryMatrix> propagators,
                        const Tolerances& tol = kDefaultTolerances)
        : initial_(std::move(initial_state)), slots_(std::move(slots)), propagators_(std::move(propagators)) {
        validate(tol);
    }

    /// Propagators generated as exp(−i·H·Δt) from the slot times.
    MeasurementSchedule(Vector initial_state, std::vector<MeasurementSlot> slots,
                        const Matrix& hamiltonian, const Tolerances& tol = kDefaultTolerances)
        : initial_(std::move(initial_state)), slots_(std::move(slots)) {
        double previous = 0.0;
        for (const MeasurementSlot& slot : slots_) {
            propagators_.push_back(hermitian_propagator(hamiltonian, slot.time - previous, tol));
            previous = slot.time;
        }
        validate(tol);
    }

    int dimension() const { return initial_.dim(); }
    std::size_t slot_count() const { return slots_.size(); }
    const Vector& initial_state() const { return initial_; }
    const MeasurementSlot& slot(std::size_t k) const { return slots_[k]; }
    const UnitaryMatrix& propagator(std::size_t k) const { return propagators_[k]; }

    std::vector<bool> measured_mask() const {
        std::vector<bool> mask;
        mask.reserve(slots_.size());
        for (const MeasurementSlot& s : slots_) mask.push_back(s.measured);
        return mask;
    }

    MeasurementSchedule with_measured_mask(const std::vector<bool>& mask) const {
        if (mask.size() != slots_.size())
            throw DimensionMismatch("with_measured_mask: mask length does not match slot count");
        MeasurementSchedule copy = *this;
        for (std::size_t k = 0; k < mask.size(); ++k) copy.slots_[k].measured = mask[k];
        return copy;
    }

    /// Product of per-slot outcome counts.
    std::size_t path_count() const {
        std::size_t n = 1;
        for (const MeasurementSlot& s : slots_) n *= static_cast<std::size_t>(s.observable.outcome_count());
        return n;
    }

private:
    void validate(const Tolerances& tol) {
        if (slots_.empty()) throw Error("MeasurementSchedule: needs at least one slot");
        if (slots_.size() > static_cast<std::size_t>(kMaxSlots))
            throw EnumerationBoundExceeded("MeasurementSchedule: more than " +
                                           std::to_string(kMaxSlots) + " slots");
        if (propagators_.size() != slots_.size())
            throw DimensionMismatch("MeasurementSchedule: propagator count must equal slot count");
        if (std::abs(initial_.squared_norm() - 1.0) > tol.equality)
            throw Error("MeasurementSchedule: initial state is not normalized");

        double previous = 0.0;
        std::size_t count = 1;
        for (std::size_t k = 0; k < slots_.size(); ++k) {
            detail::require_finite(slots_[k].time, "MeasurementSchedule");
            if (slots_[k].time < previous)
                throw InvalidRange("MeasurementSchedule: slot times must be non-decreasing from 0");
            previous = slots_[k].time;
            if (slots_[k].observable.dim() != dimension() || propagators_[k].dim() != dimension())
                throw DimensionMismatch("MeasurementSchedule: inconsistent dimensions");
            count *= static_cast<std::size_t>(slots_[k].observable.outcome_count());
            if (count > kMaxPathCount)
                throw EnumerationBoundExceeded("MeasurementSchedule: outcome-count product exceeds " +
                                               std::to_string(kMaxPathCount));
        }
    }

    Vector initial_;
    std::vector<MeasurementSlot> slots_;
    std::vector<UnitaryMatrix> propagators_;
};

/// One outcome sequence (index per slot, index 0 = largest eigenvalue) with its
/// complex amplitude: the chain ⟨q_K| Û_K P_{q_{K-1}} Û_{K-1} ⋯ P_{q_1} Û_1 |ψ₀⟩.
struct VirtualPath {
    std::vector<int> outcomes;
    Complex amplitude;
};

inline std::size_t path_count(const MeasurementSchedule& schedule) { return schedule.path_count(); }

/// All virtual paths of a schedule in lexicographic outcome order, measured flags
/// ignored. Interior slots may carry degenerate outcomes (projector insertion);
/// the final slot's outcomes must be rank 1 so each path has a scalar amplitude.
inline std::vector<VirtualPath> enumerate_virtual_paths(const MeasurementSchedule& schedule) {
    if (schedule.path_count() > kMaxPathCount)
        throw EnumerationBoundExceeded("enumerate_virtual_paths: path count exceeds bound");

    std::vector<VirtualPath> paths;
    paths.reserve(schedule.path_count());
    std::vector<int> outcomes(schedule.slot_count(), 0);

    auto walk = [&](auto&& self, std::size_t k, const Vector& state) -> void {
        const Vector evolved = schedule.propagator(k) * state;
        const Observable& obs = schedule.slot(k).observable;
        const bool last = k + 1 == schedule.slot_count();
        for (int q = 0; q < obs.outcome_count(); ++q) {
            outcomes[k] = q;
            if (last) {
                const Observable::Outcome& oc = obs.outcome(q);
                if (oc.eigenvectors.size() != 1)
                    throw Error("enumerate_virtual_paths: final slot outcome is degenerate, "
                                "no scalar amplitude exists");
                paths.push_back({outcomes, oc.eigenvectors.front().inner(evolved)});
            } else {
                self(self, k + 1, obs.project(q, evolved));
            }
        }
    };
    walk(walk, 0, schedule.initial_state());
    return paths;
}

/// The three-slot qubit schedule used throughout: measurements of the ±1 quantity
/// at t = 0, τ and T, unit-frequency flip dynamics, initial state pinned to the
/// +1 eigenvector so the first outcome is always +1.
inline MeasurementSchedule rabi_qubit_schedule(double tau, double T,
                                               const std::array<bool, 3>& measured) {
    detail::require_finite(tau, "rabi_qubit_schedule");
    detail::require_finite(T, "rabi_qubit_schedule");
    if (tau < 0.0 || T < tau)
        throw InvalidRange("rabi_qubit_schedule: need 0 <= tau <= T");

    const Observable q = Observable::pauli_z();
    std::vector<MeasurementSlot> slots{{0.0, q, measured[0]}, {tau, q, measured[1]}, {T, q, measured[2]}};
    std::vector<UnitaryMatrix> propagators{rabi_unitary(0.0), rabi_unitary(tau), rabi_unitary(T - tau)};
    return MeasurementSchedule(Vector::basis(2, 0), std::move(slots), std::move(propagators));
}

} // namespace pathsig
