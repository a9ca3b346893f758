#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pathsig/common.hpp"
#include "pathsig/ensemble.hpp"
#include "pathsig/pathspace.hpp"
#include "pathsig/witness.hpp"

namespace pathsig {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Shortest exact decimal form is not needed; 17 significant digits round-trip
/// any double, which is what the regression files rely on.
inline std::string format_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

enum class WitnessField { DeltaP, DeltaQuasi, DeltaL, RegimeIndex };

inline std::string to_string(WitnessField field) {
    switch (field) {
    case WitnessField::DeltaP: return "delta_P";
    case WitnessField::DeltaQuasi: return "delta_p";
    case WitnessField::DeltaL: return "delta_L";
    case WitnessField::RegimeIndex: return "regime";
    }
    throw Error("to_string: unknown witness field");
}

inline WitnessField parse_witness_field(const std::string& name) {
    if (name == "delta_P") return WitnessField::DeltaP;
    if (name == "delta_p") return WitnessField::DeltaQuasi;
    if (name == "delta_L") return WitnessField::DeltaL;
    if (name == "regime") return WitnessField::RegimeIndex;
    throw InvalidRange("unknown witness field '" + name + "' (expected delta_P, delta_p, delta_L or regime)");
}

enum class OutputFormat { Csv, Json, Pgm };

inline std::string to_string(OutputFormat format) {
    switch (format) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Pgm: return "pgm";
    }
    throw Error("to_string: unknown output format");
}

inline OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    if (name == "pgm") return OutputFormat::Pgm;
    throw InvalidRange("unknown output format '" + name + "' (expected csv, json or pgm)");
}

struct GridScanConfig {
    std::array<double, 2> tau_range{0.0, kTwoPi};
    std::array<double, 2> T_range{0.0, kTwoPi};
    int n_tau = 512;
    int n_T = 512;
    bool constrain_tau_le_T = true; // points with τ > T become explicit nulls
    std::vector<WitnessField> witnesses{WitnessField::DeltaP, WitnessField::DeltaQuasi,
                                        WitnessField::DeltaL, WitnessField::RegimeIndex};
    OutputFormat format = OutputFormat::Csv;
    Tolerances tolerances;
    int jobs = 1; // 0 = one worker per hardware thread
};

/// i-th of n equally spaced nodes covering [lo, hi] inclusive (n ≥ 2).
inline double grid_node(double lo, double hi, int n, int i) {
    return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
}

struct GridScanPoint {
    double tau = 0.0;
    double T = 0.0;
    bool evaluated = false; // false = constrained-out null point
    WitnessReport report;
};

struct ScanSummary {
    std::size_t evaluated_count = 0;
    std::size_t null_count = 0;
    // fractions are over evaluated points
    double fraction_signalling = 0.0;   // |delta_P| above tolerance
    double fraction_negativity = 0.0;   // delta_p above tolerance
    double fraction_lgi_violated = 0.0; // delta_L below −tolerance
    double fraction_quantum_stochastic = 0.0;
    double fraction_classical_stochastic = 0.0;
    double fraction_classical_deterministic = 0.0;
};

struct GridScanResult {
    GridScanConfig config;
    std::vector<GridScanPoint> points; // row-major: T ascending outer, τ ascending inner
    ScanSummary summary;
};

namespace detail {

inline void validate_scan_config(const GridScanConfig& config) {
    for (const std::array<double, 2>& range : {config.tau_range, config.T_range}) {
        require_finite(range[0], "scan_grid");
        require_finite(range[1], "scan_grid");
        if (!(range[0] < range[1])) throw InvalidRange("scan_grid: range needs lo < hi");
    }
    if (config.n_tau < 2 || config.n_T < 2)
        throw InvalidRange("scan_grid: resolution must be at least 2 per axis");
    if (config.jobs < 0) throw InvalidRange("scan_grid: jobs must be >= 0");
}

} // namespace detail

/// Evaluate witness_report on every grid node, in parallel when asked, with the
/// output order fixed by (T row, τ column) regardless of worker count.
inline GridScanResult scan_grid(const GridScanConfig& config) {
    detail::validate_scan_config(config);

    GridScanResult result;
    result.config = config;
    result.points.resize(static_cast<std::size_t>(config.n_tau) * static_cast<std::size_t>(config.n_T));
    for (int j = 0; j < config.n_T; ++j) {
        const double T = grid_node(config.T_range[0], config.T_range[1], config.n_T, j);
        for (int i = 0; i < config.n_tau; ++i) {
            GridScanPoint& point = result.points[static_cast<std::size_t>(j) * config.n_tau + i];
            point.tau = grid_node(config.tau_range[0], config.tau_range[1], config.n_tau, i);
            point.T = T;
            point.evaluated = !(config.constrain_tau_le_T && point.tau > point.T);
        }
    }

    auto evaluate = [&](GridScanPoint& point) {
        if (point.evaluated) point.report = witness_report(point.tau, point.T, config.tolerances);
    };

    unsigned workers = config.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                        : static_cast<unsigned>(config.jobs);
    workers = std::min<unsigned>(workers, static_cast<unsigned>(result.points.size()));
    if (workers <= 1) {
        for (GridScanPoint& point : result.points) evaluate(point);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto drain = [&] {
            try {
                for (std::size_t k = next.fetch_add(1); k < result.points.size(); k = next.fetch_add(1))
                    evaluate(result.points[k]);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (std::thread& worker : pool) worker.join();
        if (failure) std::rethrow_exception(failure);
    }

    ScanSummary& s = result.summary;
    std::size_t signalling = 0, negativity = 0, lgi = 0, quantum = 0, stochastic = 0, deterministic = 0;
    for (const GridScanPoint& point : result.points) {
        if (!point.evaluated) {
            ++s.null_count;
            continue;
        }
        ++s.evaluated_count;
        signalling += point.report.signalling_detected;
        negativity += point.report.negativity_detected;
        lgi += point.report.lgi_violated;
        quantum += point.report.regime == Regime::QuantumStochastic;
        stochastic += point.report.regime == Regime::ClassicalStochastic;
        deterministic += point.report.regime == Regime::ClassicalDeterministic;
    }
    if (s.evaluated_count > 0) {
        const double denom = static_cast<double>(s.evaluated_count);
        s.fraction_signalling = static_cast<double>(signalling) / denom;
        s.fraction_negativity = static_cast<double>(negativity) / denom;
        s.fraction_lgi_violated = static_cast<double>(lgi) / denom;
        s.fraction_quantum_stochastic = static_cast<double>(quantum) / denom;
        s.fraction_classical_stochastic = static_cast<double>(stochastic) / denom;
        s.fraction_classical_deterministic = static_cast<double>(deterministic) / denom;
    }
    return result;
}

/// Fixed CSV schema; null points keep their coordinates and carry nan / null / 0
/// in the witness columns so the row count always equals n_tau × n_T.
inline void write_csv(const GridScanResult& result, std::ostream& out) {
    out << "tau,T,delta_P,delta_p,delta_L,p1,p2,p3,p4,regime,lgi_violated\n";
    for (const GridScanPoint& point : result.points) {
        out << format_real(point.tau) << ',' << format_real(point.T) << ',';
        if (point.evaluated) {
            const WitnessReport& w = point.report;
            out << format_real(w.delta_P) << ',' << format_real(w.quasi.delta_p) << ','
                << format_real(w.delta_L) << ',' << format_real(w.quasi.p[0]) << ','
                << format_real(w.quasi.p[1]) << ',' << format_real(w.quasi.p[2]) << ','
                << format_real(w.quasi.p[3]) << ',' << to_string(w.regime) << ','
                << (w.lgi_violated ? '1' : '0') << '\n';
        } else {
            out << "nan,nan,nan,nan,nan,nan,nan,null,0\n";
        }
    }
    if (!out) throw OutputWriteFailure("write_csv: stream write failed");
}

namespace detail {

inline double witness_value(const WitnessReport& report, WitnessField field) {
    switch (field) {
    case WitnessField::DeltaP: return report.delta_P;
    case WitnessField::DeltaQuasi: return report.quasi.delta_p;
    case WitnessField::DeltaL: return report.delta_L;
    case WitnessField::RegimeIndex:
        switch (report.regime) { // brightness order: the "more quantum", the brighter
        case Regime::ClassicalDeterministic: return 0.0;
        case Regime::ClassicalStochastic: return 1.0;
        case Regime::QuantumStochastic: return 2.0;
        }
        throw Error("witness_value: unknown regime");
    }
    throw Error("witness_value: unknown field");
}

} // namespace detail

/// 8-bit binary PGM of one witness over the grid. Evaluated points scale
/// linearly from [min, max] to pixel values [1, 255]; pixel 0 is reserved for
/// null points. Top image row is the largest T. Bounds go into the sidecar.
inline void write_pgm(const GridScanResult& result, WitnessField field, std::ostream& out) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const GridScanPoint& point : result.points) {
        if (!point.evaluated) continue;
        const double value = detail::witness_value(point.report, field);
        lo = any ? std::min(lo, value) : value;
        hi = any ? std::max(hi, value) : value;
        any = true;
    }
    if (!any) throw InvalidRange("write_pgm: no evaluated points to map");

    out << "P5\n" << result.config.n_tau << ' ' << result.config.n_T << "\n255\n";
    const double span = hi - lo;
    for (int j = result.config.n_T; j-- > 0;) {
        for (int i = 0; i < result.config.n_tau; ++i) {
            const GridScanPoint& point =
                result.points[static_cast<std::size_t>(j) * result.config.n_tau + i];
            unsigned char pixel = 0;
            if (point.evaluated) {
                const double value = detail::witness_value(point.report, field);
                pixel = span == 0.0
                            ? static_cast<unsigned char>(255)
                            : static_cast<unsigned char>(
                                  1 + std::lround(254.0 * (value - lo) / span));
            }
            out.put(static_cast<char>(pixel));
        }
    }
    if (!out) throw OutputWriteFailure("write_pgm: stream write failed");
}

/// Metadata that makes a PGM reproducible: which field, the value-to-pixel
/// scaling bounds, grid shape and ranges, and the row order convention.
inline std::string pgm_sidecar_json(const GridScanResult& result, WitnessField field) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const GridScanPoint& point : result.points) {
        if (!point.evaluated) continue;
        const double value = detail::witness_value(point.report, field);
        lo = any ? std::min(lo, value) : value;
        hi = any ? std::max(hi, value) : value;
        any = true;
    }
    if (!any) throw InvalidRange("pgm_sidecar_json: no evaluated points to map");

    std::ostringstream out;
    out << "{\n"
        << "  \"field\": \"" << to_string(field) << "\",\n"
        << "  \"min\": " << format_real(lo) << ",\n"
        << "  \"max\": " << format_real(hi) << ",\n"
        << "  \"n_tau\": " << result.config.n_tau << ",\n"
        << "  \"n_T\": " << result.config.n_T << ",\n"
        << "  \"tau_range\": [" << format_real(result.config.tau_range[0]) << ", "
        << format_real(result.config.tau_range[1]) << "],\n"
        << "  \"T_range\": [" << format_real(result.config.T_range[0]) << ", "
        << format_real(result.config.T_range[1]) << "],\n"
        << "  \"pixel_range\": [1, 255],\n"
        << "  \"null_pixel\": 0,\n"
        << "  \"row_order\": \"T descending\"\n"
        << "}\n";
    return out.str();
}

namespace detail {

inline std::string outcome_labels(const std::vector<int>& outcomes,
                                  const std::vector<std::vector<double>>& eigenvalues) {
    std::ostringstream out;
    out << '[';
    for (std::size_t pos = 0; pos < outcomes.size(); ++pos) {
        const double value = eigenvalues[pos][static_cast<std::size_t>(outcomes[pos])];
        if (pos > 0) out << ' ';
        out << (value >= 0.0 ? "+" : "") << format_real(value);
    }
    out << ']';
    return out.str();
}

} // namespace detail

/// Human-readable listing of one point's real ensemble: each recorded outcome
/// sequence (eigenvalue labels) with its probability, followed by the full set
/// of virtual paths with complex amplitudes.
inline std::string dump_ensemble(double tau, double T, const std::array<bool, 3>& measured) {
    const MeasurementSchedule schedule = rabi_qubit_schedule(tau, T, measured);
    const Ensemble ensemble = real_ensemble(schedule);
    const std::vector<VirtualPath> virtual_paths = enumerate_virtual_paths(schedule);

    std::ostringstream out;
    out << "point: tau = " << format_real(tau) << ", T = " << format_real(T) << '\n';
    out << "measured slots:";
    const char* names[3] = {"0", "tau", "T"};
    for (std::size_t k = 0; k < 3; ++k)
        if (measured[k]) out << " t=" << names[k];
    out << '\n';

    out << "real paths: " << ensemble.paths.size() << '\n';
    for (const RealPath& path : ensemble.paths)
        out << "  q = " << detail::outcome_labels(path.outcomes, ensemble.outcome_eigenvalues)
            << "  probability = " << format_real(path.probability) << '\n';

    std::vector<std::vector<double>> all_eigenvalues;
    for (std::size_t k = 0; k < schedule.slot_count(); ++k) {
        const Observable& obs = schedule.slot(k).observable;
        std::vector<double> eigenvalues;
        for (int q = 0; q < obs.outcome_count(); ++q) eigenvalues.push_back(obs.eigenvalue(q));
        all_eigenvalues.push_back(std::move(eigenvalues));
    }
    out << "virtual paths: " << virtual_paths.size() << '\n';
    for (const VirtualPath& path : virtual_paths)
        out << "  q = " << detail::outcome_labels(path.outcomes, all_eigenvalues)
            << "  amplitude = (" << format_real(path.amplitude.real()) << ", "
            << format_real(path.amplitude.imag()) << ")\n";
    return out.str();
}

inline std::string human_regime(Regime regime) {
    switch (regime) {
    case Regime::QuantumStochastic: return "quantum stochastic";
    case Regime::ClassicalStochastic: return "classical stochastic";
    case Regime::ClassicalDeterministic: return "classical deterministic";
    }
    throw Error("human_regime: unknown regime");
}

/// Textual single-point report wrapping witness_report.
inline std::string classify_point(double tau, double T, const Tolerances& tol = kDefaultTolerances) {
    const WitnessReport report = witness_report(tau, T, tol);
    const Ensemble e12 = real_ensemble(rabi_qubit_schedule(tau, T, {true, true, false}));
    const Ensemble e13 = real_ensemble(rabi_qubit_schedule(tau, T, {true, false, true}));
    const Ensemble e123 = real_ensemble(rabi_qubit_schedule(tau, T, {true, true, true}));
    const PreexistenceReport pre = preexistence_check(e123, e13, e12, tol.zero);

    double worst = 0.0;
    for (double r : pre.final_slot_residuals) worst = std::max(worst, std::abs(r));
    for (double r : pre.middle_slot_residuals) worst = std::max(worst, std::abs(r));

    std::ostringstream out;
    out << "point: tau = " << format_real(tau) << ", T = " << format_real(T) << '\n'
        << "regime: " << human_regime(report.regime) << '\n'
        << "delta_P = " << format_real(report.delta_P)
        << (report.signalling_detected ? "  (middle measurement shifts the final statistics)\n"
                                       : "  (no shift above tolerance)\n")
        << "delta_p = " << format_real(report.quasi.delta_p)
        << (report.negativity_detected ? "  (negative quasi-probability)\n" : "  (no negativity)\n")
        << "delta_L = " << format_real(report.delta_L)
        << (report.lgi_violated ? "  (two-time-correlator bound violated)\n"
                                : "  (two-time-correlator bound satisfied)\n")
        << "correlators: alpha = " << format_real(report.correlators.alpha)
        << ", beta = " << format_real(report.correlators.beta)
        << ", gamma = " << format_real(report.correlators.gamma) << '\n'
        << "quasi-probabilities: " << format_real(report.quasi.p[0]) << ' '
        << format_real(report.quasi.p[1]) << ' ' << format_real(report.quasi.p[2]) << ' '
        << format_real(report.quasi.p[3]) << '\n'
        << "preexisting-value model: "
        << (pre.feasible ? "feasible" : "infeasible")
        << " (largest marginal residual = " << format_real(worst) << ")\n";
    return out.str();
}

} // namespace pathsig
