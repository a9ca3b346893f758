// Command-line front end: sweep the (tau, T) plane and emit witness maps
// (csv/json/pgm), dump single-point ensembles, or classify a single point.
//
// Exit codes: 0 success, 1 bad usage or invalid configuration, 2 write failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathsig/pathsig.hpp"

namespace {

using namespace pathsig;

std::string trimmed(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const std::size_t last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw InvalidRange("");
        return value;
    } catch (const std::exception&) {
        throw InvalidRange(what + ": expected a number, got '" + text + "'");
    }
}

int parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used != text.size()) throw InvalidRange("");
        return value;
    } catch (const std::exception&) {
        throw InvalidRange(what + ": expected an integer, got '" + text + "'");
    }
}

// "lo:hi" → {lo, hi}
std::array<double, 2> parse_range(const std::string& text, const std::string& what) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos)
        throw InvalidRange(what + ": expected 'lo:hi', got '" + text + "'");
    return {parse_real(trimmed(text.substr(0, colon)), what),
            parse_real(trimmed(text.substr(colon + 1)), what)};
}

// "NxM" → {N, M}
std::array<int, 2> parse_grid(const std::string& text) {
    const std::size_t cross = text.find('x');
    if (cross == std::string::npos || text.find('x', cross + 1) != std::string::npos)
        throw InvalidRange("grid: expected 'NxM', got '" + text + "'");
    return {parse_int(trimmed(text.substr(0, cross)), "grid"),
            parse_int(trimmed(text.substr(cross + 1)), "grid")};
}

bool parse_on_off(const std::string& text, const std::string& what) {
    if (text == "on" || text == "true" || text == "1") return true;
    if (text == "off" || text == "false" || text == "0") return false;
    throw InvalidRange(what + ": expected on/off, got '" + text + "'");
}

std::vector<WitnessField> parse_witness_list(const std::vector<std::string>& names) {
    std::vector<WitnessField> fields;
    for (const std::string& name : names) fields.push_back(parse_witness_field(name));
    return fields;
}

std::vector<std::string> split_on_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) parts.push_back(trimmed(part));
    return parts;
}

struct ScanInvocation {
    GridScanConfig grid;
    std::string out_path; // empty = stdout (not allowed for pgm)
};

// key = value file, '#' starts a comment, blank lines ignored.
void apply_config_file(const std::string& path, ScanInvocation& invocation) {
    std::ifstream file(path);
    if (!file) throw InvalidRange("config: cannot read '" + path + "'");
    std::string line;
    int line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trimmed(line);
        if (line.empty()) continue;
        const std::size_t split = line.find('=');
        if (split == std::string::npos)
            throw InvalidRange("config: line " + std::to_string(line_number) +
                               " is not 'key = value'");
        const std::string key = trimmed(line.substr(0, split));
        const std::string value = trimmed(line.substr(split + 1));

        if (key == "tau_range") {
            invocation.grid.tau_range = parse_range(value, key);
        } else if (key == "T_range") {
            invocation.grid.T_range = parse_range(value, key);
        } else if (key == "grid") {
            const std::array<int, 2> sizes = parse_grid(value);
            invocation.grid.n_tau = sizes[0];
            invocation.grid.n_T = sizes[1];
        } else if (key == "constraint") {
            invocation.grid.constrain_tau_le_T = parse_on_off(value, key);
        } else if (key == "witnesses") {
            invocation.grid.witnesses = parse_witness_list(split_on_commas(value));
        } else if (key == "format") {
            invocation.grid.format = parse_output_format(value);
        } else if (key == "out") {
            invocation.out_path = value;
        } else if (key == "tol") {
            invocation.grid.tolerances.zero = parse_real(value, key);
        } else if (key == "jobs") {
            invocation.grid.jobs = parse_int(value, key);
        } else {
            throw InvalidRange("config: unknown key '" + key + "'");
        }
    }
}

nlohmann::json config_json(const GridScanConfig& config) {
    std::vector<std::string> witness_names;
    for (WitnessField field : config.witnesses) witness_names.push_back(to_string(field));
    return {{"tau_range", {config.tau_range[0], config.tau_range[1]}},
            {"T_range", {config.T_range[0], config.T_range[1]}},
            {"grid", {config.n_tau, config.n_T}},
            {"constraint", config.constrain_tau_le_T},
            {"witnesses", witness_names},
            {"format", to_string(config.format)},
            {"tolerance", config.tolerances.zero},
            {"jobs", config.jobs}};
}

// Same fields as the CSV schema, one object per grid point; constrained-out
// points carry a null regime and no witness values.
nlohmann::json result_json(const GridScanResult& result) {
    nlohmann::json points = nlohmann::json::array();
    for (const GridScanPoint& point : result.points) {
        nlohmann::json entry{{"tau", point.tau}, {"T", point.T}};
        if (point.evaluated) {
            const WitnessReport& r = point.report;
            entry["delta_P"] = r.delta_P;
            entry["delta_p"] = r.quasi.delta_p;
            entry["delta_L"] = r.delta_L;
            entry["p1"] = r.quasi.p[0];
            entry["p2"] = r.quasi.p[1];
            entry["p3"] = r.quasi.p[2];
            entry["p4"] = r.quasi.p[3];
            entry["regime"] = to_string(r.regime);
            entry["lgi_violated"] = r.lgi_violated;
        } else {
            entry["regime"] = nullptr;
        }
        points.push_back(std::move(entry));
    }
    const ScanSummary& s = result.summary;
    return {{"config", config_json(result.config)},
            {"points", std::move(points)},
            {"summary",
             {{"evaluated_count", s.evaluated_count},
              {"null_count", s.null_count},
              {"fraction_signalling", s.fraction_signalling},
              {"fraction_negativity", s.fraction_negativity},
              {"fraction_lgi_violated", s.fraction_lgi_violated},
              {"fraction_quantum_stochastic", s.fraction_quantum_stochastic},
              {"fraction_classical_stochastic", s.fraction_classical_stochastic},
              {"fraction_classical_deterministic", s.fraction_classical_deterministic}}}};
}

void write_text_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!std::cout) throw OutputWriteFailure("writing to stdout failed");
        return;
    }
    std::ofstream file(out_path);
    if (!file) throw OutputWriteFailure("cannot open '" + out_path + "' for writing");
    file << text;
    file.flush();
    if (!file) throw OutputWriteFailure("writing '" + out_path + "' failed");
}

void print_summary(const GridScanResult& result) {
    const ScanSummary& s = result.summary;
    std::fprintf(stderr, "evaluated %zu of %zu grid points (%zu nulls)\n", s.evaluated_count,
                 s.evaluated_count + s.null_count, s.null_count);
    std::fprintf(stderr, "fractions: signalling %.4f, negativity %.4f, bound violation %.4f\n",
                 s.fraction_signalling, s.fraction_negativity, s.fraction_lgi_violated);
    std::fprintf(stderr,
                 "regimes: quantum stochastic %.4f, classical stochastic %.4f, "
                 "classical deterministic %.4f\n",
                 s.fraction_quantum_stochastic, s.fraction_classical_stochastic,
                 s.fraction_classical_deterministic);
}

int run_scan(const ScanInvocation& invocation) {
    const GridScanConfig& config = invocation.grid;
    if (config.format == OutputFormat::Pgm) {
        if (invocation.out_path.empty())
            throw InvalidRange("pgm output is binary; --out is required");
        if (config.witnesses.size() != 1)
            throw InvalidRange("pgm output needs exactly one --witness field");
    }

    const GridScanResult result = scan_grid(config);

    switch (config.format) {
    case OutputFormat::Csv: {
        std::ostringstream body;
        write_csv(result, body);
        write_text_output(invocation.out_path, body.str());
        break;
    }
    case OutputFormat::Json: {
        write_text_output(invocation.out_path, result_json(result).dump(2) + "\n");
        break;
    }
    case OutputFormat::Pgm: {
        const WitnessField field = config.witnesses.front();
        std::ofstream file(invocation.out_path, std::ios::binary);
        if (!file) throw OutputWriteFailure("cannot open '" + invocation.out_path + "' for writing");
        write_pgm(result, field, file);
        file.flush();
        if (!file) throw OutputWriteFailure("writing '" + invocation.out_path + "' failed");
        write_text_output(invocation.out_path + ".json", pgm_sidecar_json(result, field));
        std::fprintf(stderr, "wrote %s and %s.json\n", invocation.out_path.c_str(),
                     invocation.out_path.c_str());
        break;
    }
    }
    print_summary(result);
    return 0;
}

std::array<bool, 3> parse_mask(const std::string& text) {
    if (text.size() != 3 || text.find_first_not_of("01") != std::string::npos)
        throw InvalidRange("mask: expected three 0/1 digits (e.g. 101), got '" + text + "'");
    return {text[0] == '1', text[1] == '1', text[2] == '1'};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential-measurement path ensembles: witness scans over the (tau, T) plane"};
    app.require_subcommand(1);

    // scan
    auto* scan = app.add_subcommand("scan", "Evaluate the witnesses on a (tau, T) grid");
    std::string config_path, tau_range_text, T_range_text, grid_text, constraint_text;
    std::string format_text, scan_out;
    std::vector<std::string> witness_names;
    double scan_tol = 0.0;
    int jobs = 0;
    auto* opt_config = scan->add_option("--config", config_path, "key = value config file");
    auto* opt_tau_range = scan->add_option("--tau", tau_range_text, "tau range as lo:hi");
    auto* opt_T_range = scan->add_option("--T", T_range_text, "T range as lo:hi");
    auto* opt_grid = scan->add_option("--grid", grid_text, "resolution as NxM (tau x T)");
    auto* opt_constraint =
        scan->add_option("--constraint", constraint_text, "on/off: restrict to tau <= T (default on)");
    auto* opt_witness = scan->add_option("--witness", witness_names,
                                         "witness field(s): delta_P, delta_p, delta_L, regime");
    auto* opt_format = scan->add_option("--format", format_text, "output format: csv, json or pgm");
    auto* opt_scan_out = scan->add_option("--out", scan_out, "output file (default stdout)");
    auto* opt_scan_tol = scan->add_option("--tol", scan_tol, "witness decision tolerance");
    auto* opt_jobs = scan->add_option("--jobs", jobs, "worker threads (0 = all hardware threads)");

    // dump
    auto* dump = app.add_subcommand("dump", "List real paths and virtual amplitudes at one point");
    double dump_tau = 0.0, dump_T = 0.0;
    std::string mask_text = "111", dump_out;
    dump->add_option("--tau", dump_tau, "first evolution time")->required();
    dump->add_option("--T", dump_T, "total evolution time")->required();
    dump->add_option("--mask", mask_text, "measured slots as three 0/1 digits (default 111)");
    dump->add_option("--out", dump_out, "output file (default stdout)");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Report the regime and witnesses at one point");
    double classify_tau = 0.0, classify_T = 0.0, classify_tol = kDefaultTolerances.zero;
    std::string classify_out;
    classify_cmd->add_option("--tau", classify_tau, "first evolution time")->required();
    classify_cmd->add_option("--T", classify_T, "total evolution time")->required();
    classify_cmd->add_option("--tol", classify_tol, "witness decision tolerance");
    classify_cmd->add_option("--out", classify_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // help/version exit 0, anything malformed exits 1
    }

    try {
        if (*scan) {
            ScanInvocation invocation; // defaults < config file < flags
            if (opt_config->count()) apply_config_file(config_path, invocation);
            if (opt_tau_range->count())
                invocation.grid.tau_range = parse_range(tau_range_text, "tau");
            if (opt_T_range->count()) invocation.grid.T_range = parse_range(T_range_text, "T");
            if (opt_grid->count()) {
                const std::array<int, 2> sizes = parse_grid(grid_text);
                invocation.grid.n_tau = sizes[0];
                invocation.grid.n_T = sizes[1];
            }
            if (opt_constraint->count())
                invocation.grid.constrain_tau_le_T = parse_on_off(constraint_text, "constraint");
            if (opt_witness->count()) invocation.grid.witnesses = parse_witness_list(witness_names);
            if (opt_format->count()) invocation.grid.format = parse_output_format(format_text);
            if (opt_scan_out->count()) invocation.out_path = scan_out;
            if (opt_scan_tol->count()) invocation.grid.tolerances.zero = scan_tol;
            if (opt_jobs->count()) invocation.grid.jobs = jobs;
            return run_scan(invocation);
        }
        if (*dump) {
            write_text_output(dump_out, dump_ensemble(dump_tau, dump_T, parse_mask(mask_text)));
            return 0;
        }
        Tolerances tol = kDefaultTolerances;
        tol.zero = classify_tol;
        write_text_output(classify_out, classify_point(classify_tau, classify_T, tol));
        return 0;
    } catch (const OutputWriteFailure& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
}
