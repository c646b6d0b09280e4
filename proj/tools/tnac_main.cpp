// tnac command-line driver. Talks to the core exclusively through the C API
// in tnac/tnac.h; configuration and report formatting live here.
//
// Exit codes: 0 success, 1 assertion/equivalence failure, 2 usage or
// configuration error.

#include <tnac/tnac.h>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct CliError {
    std::string message;
};

[[noreturn]] void die(const std::string& message) { throw CliError{message}; }

void check(tnac_status status, const std::string& context) {
    if (status != TNAC_OK) {
        die(context + ": " + tnac_status_name(status) + " (" + tnac_last_error() + ")");
    }
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is.good()) die("cannot open config file '" + path + "'");
    json j = json::parse(is, nullptr, false);
    if (j.is_discarded()) die("config file '" + path + "' is not valid JSON");
    return j;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    return p.string();
}

// Misspelled keys would silently fall back to defaults, which is poison for
// reproducibility, so configs are validated against the documented keys.
void check_known_keys(const json& object, const std::vector<std::string>& known,
                      const std::string& what) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            die("unknown key '" + key + "' in " + what);
        }
    }
}

using TensorPtr = std::unique_ptr<tnac_tensor, decltype(&tnac_tensor_free)>;
using NetworkPtr = std::unique_ptr<tnac_network, decltype(&tnac_network_free)>;
using CircuitPtr = std::unique_ptr<tnac_circuit, decltype(&tnac_circuit_free)>;

CircuitPtr load_circuit(const json& config, const std::string& base_dir) {
    tnac_circuit* raw = nullptr;
    if (config.contains("circuit") && config.at("circuit").is_string()) {
        const std::string path =
            resolve_path(base_dir, config.at("circuit").get<std::string>());
        check(tnac_circuit_read(path.c_str(), &raw), "loading circuit '" + path + "'");
    } else if (config.contains("family") && config.at("family").is_object()) {
        const std::string text = config.at("family").dump();
        check(tnac_circuit_parse(text.c_str(), base_dir.c_str(), &raw),
              "parsing inline circuit");
    } else {
        die("config needs either \"circuit\": <path> or \"family\": {...}");
    }
    return CircuitPtr(raw, tnac_circuit_free);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os.good()) die("cannot open output file '" + path + "'");
    os << text;
    if (!os.good()) die("write to '" + path + "' failed");
}

// ---- verify-equivalence ----------------------------------------------------

struct VerifyOptions {
    std::string config_path;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::optional<std::int64_t> budget;
    std::string out_path;
    bool dry_run = false;
};

int run_verify(const VerifyOptions& opt) {
    const json config = load_json_file(opt.config_path);
    const std::string base_dir = fs::path(opt.config_path).parent_path().string();
    check_known_keys(config,
                     {"circuit", "family", "network", "trials", "seed", "tolerance",
                      "budget", "leg_budget"},
                     "verify config");

    const int trials = opt.trials.value_or(config.value("trials", 1));
    if (!opt.seed.has_value() && !config.contains("seed")) {
        die("a seed is mandatory: set \"seed\" in the config or pass --seed");
    }
    const std::uint64_t seed = opt.seed.value_or(config.value("seed", std::uint64_t{0}));
    const double tolerance = opt.tolerance.value_or(config.value("tolerance", 1e-10));
    const std::int64_t budget =
        opt.budget.value_or(config.value("budget", std::int64_t{1} << 20));
    const int leg_budget = config.value("leg_budget", 64);
    const std::string network_path =
        config.contains("network") && config.at("network").is_string()
            ? resolve_path(base_dir, config.at("network").get<std::string>())
            : std::string();

    if (trials < 1) die("trials must be >= 1");
    if (!network_path.empty() && trials != 1) {
        die("an explicit network file pins one weight draw; use trials = 1");
    }

    std::ostringstream report;
    report << "verify-equivalence\n";
    report << "config: " << opt.config_path << "\n";
    report << "trials: " << trials << "\n";
    report << "seed: " << seed << "\n";
    report << "tolerance: " << format_value(tolerance) << "\n";
    if (opt.dry_run) {
        report << "dry-run: no computation performed\n";
        std::cout << report.str();
        return kExitOk;
    }

    CircuitPtr circuit = load_circuit(config, base_dir);
    int32_t n = 0;
    int64_t m = 0;
    check(tnac_circuit_num_sites(circuit.get(), &n), "querying circuit");
    check(tnac_circuit_site_dim(circuit.get(), &m), "querying circuit");

    double worst = 0.0;
    int worst_draw = 0;
    std::string worst_config;
    for (int draw = 0; draw < trials; ++draw) {
        if (network_path.empty() || trials > 1) {
            check(tnac_circuit_randomize(circuit.get(), tnac_derive_seed(seed, draw)),
                  "drawing weights");
        }

        tnac_network* net_raw = nullptr;
        if (!network_path.empty()) {
            check(tnac_network_read(network_path.c_str(), &net_raw),
                  "loading network '" + network_path + "'");
        } else {
            check(tnac_circuit_to_network(circuit.get(), leg_budget, &net_raw),
                  "building equivalent network");
        }
        NetworkPtr net(net_raw, tnac_network_free);

        tnac_tensor* from_net_raw = nullptr;
        check(tnac_network_dup_contract(net.get(), budget, &from_net_raw),
              "contracting network");
        TensorPtr from_net(from_net_raw, tnac_tensor_free);

        tnac_tensor* from_circuit_raw = nullptr;
        check(tnac_circuit_materialize(circuit.get(), budget, &from_circuit_raw),
              "materializing circuit");
        TensorPtr from_circuit(from_circuit_raw, tnac_tensor_free);

        double deviation = 0.0;
        check(tnac_tensor_max_rel_deviation(from_net.get(), from_circuit.get(), &deviation),
              "comparing amplitude tensors");
        report << "draw " << draw << " max_rel_deviation " << format_value(deviation)
               << "\n";
        if (deviation >= worst) {
            worst = deviation;
            worst_draw = draw;
            // Locate the worst configuration of this draw for the report.
            const double *net_data = nullptr, *circ_data = nullptr;
            int64_t len = 0;
            check(tnac_tensor_data(from_net.get(), &net_data, &len), "reading tensor");
            check(tnac_tensor_data(from_circuit.get(), &circ_data, &len), "reading tensor");
            int64_t arg = 0;
            double best_abs = -1.0;
            for (int64_t i = 0; i < len; ++i) {
                const double d = std::abs(net_data[i] - circ_data[i]);
                if (d > best_abs) {
                    best_abs = d;
                    arg = i;
                }
            }
            worst_config.clear();
            std::vector<int64_t> digits(static_cast<std::size_t>(n), 0);
            int64_t rest = arg;
            for (int axis = n - 1; axis >= 0; --axis) {
                digits[static_cast<std::size_t>(axis)] = rest % m + 1;
                rest /= m;
            }
            for (std::size_t i = 0; i < digits.size(); ++i) {
                worst_config += (i ? " " : "") + std::to_string(digits[i]);
            }
        }

        // Per-configuration table for small instances on a single draw.
        int64_t entries = 0;
        check(tnac_tensor_size(from_circuit.get(), &entries), "querying tensor");
        if (trials == 1 && entries <= 256) {
            const double *net_data = nullptr, *circ_data = nullptr;
            int64_t len = 0;
            check(tnac_tensor_data(from_net.get(), &net_data, &len), "reading tensor");
            check(tnac_tensor_data(from_circuit.get(), &circ_data, &len), "reading tensor");
            for (int64_t i = 0; i < len; ++i) {
                std::vector<int64_t> digits(static_cast<std::size_t>(n), 0);
                int64_t rest = i;
                for (int axis = n - 1; axis >= 0; --axis) {
                    digits[static_cast<std::size_t>(axis)] = rest % m + 1;
                    rest /= m;
                }
                report << "  config";
                for (auto d : digits) report << " " << d;
                report << " circuit " << format_value(circ_data[i]) << " network "
                       << format_value(net_data[i]) << " abs_dev "
                       << format_value(std::abs(circ_data[i] - net_data[i])) << "\n";
            }
        }
    }

    const bool pass = worst <= tolerance;
    report << "max deviation " << format_value(worst) << " at draw " << worst_draw
           << " configuration " << worst_config << "\n";
    report << (pass ? "PASS" : "FAIL") << " (tolerance " << format_value(tolerance)
           << ")\n";
    std::cout << report.str();
    if (!opt.out_path.empty()) write_text_file(opt.out_path, report.str());
    return pass ? kExitOk : kExitAssertion;
}

// ---- no-cloning --------------------------------------------------------------

int run_no_cloning(std::int64_t dim, bool dry_run) {
    std::ostringstream report;
    report << "no-cloning witness, dimension " << dim << "\n";
    if (dry_run) {
        report << "dry-run: no computation performed\n";
        std::cout << report.str();
        return kExitOk;
    }
    int32_t basis_cloned = 0;
    double violation = 0.0;
    check(tnac_no_cloning(dim, &basis_cloned, &violation, nullptr), "running witness");
    report << "candidate: order-3 delta tensor (forced by exact basis cloning)\n";
    report << "basis vectors cloned exactly: " << (basis_cloned ? "yes" : "no") << "\n";
    report << "all-ones violation (max entrywise deviation): " << format_value(violation)
           << "\n";
    if (dim == 1) {
        report << "note: dimension 1 is the excluded trivial case; the all-ones vector\n"
                  "coincides with the only basis vector, so cloning succeeds.\n";
    } else {
        report << "conclusion: the forced candidate fails on the all-ones vector, so no\n"
                  "tensor clones every vector of this dimension.\n";
    }
    std::cout << report.str();
    return kExitOk;
}

// ---- scaling -------------------------------------------------------------------

struct ScalingOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> budget;
    std::optional<double> tolerance;
    bool timings = false;
    bool bits = false;
    bool dry_run = false;
};

tnac_sweep_axis parse_axis(const std::string& axis) {
    if (axis == "none") return TNAC_AXIS_NONE;
    if (axis == "a_size") return TNAC_AXIS_A_SIZE;
    if (axis == "depth") return TNAC_AXIS_DEPTH;
    if (axis == "pool") return TNAC_AXIS_POOL;
    die("unknown sweep axis '" + axis + "'");
}

struct RecordArray {
    tnac_scaling_record* data = nullptr;
    int32_t count = 0;
    ~RecordArray() { tnac_records_free(data); }
};

// Applies the config's "assert" list; returns the failure messages.
std::vector<std::string> evaluate_assertions(const json& asserts,
                                             const RecordArray& records) {
    std::vector<std::string> failures;
    auto live = [&](int32_t i) { return records.data[i].skipped == 0; };

    for (const auto& a : asserts) {
        const std::string type = a.value("type", "");
        if (type == "monotone_nondecreasing") {
            const std::string field = a.value("field", "best_ee");
            double prev = -1.0;
            bool first = true;
            for (int32_t i = 0; i < records.count; ++i) {
                if (!live(i)) continue;
                const double v = field == "best_rank"
                                     ? static_cast<double>(records.data[i].best_rank)
                                     : records.data[i].best_ee;
                if (!first && v + 1e-12 < prev) {
                    failures.push_back("monotone_nondecreasing(" + field +
                                       ") violated at row " + std::to_string(i) + " (" +
                                       format_value(v) + " < " + format_value(prev) + ")");
                }
                prev = std::max(prev, v);
                first = false;
            }
        } else if (type == "rank_exceeds") {
            const std::int64_t bar = a.value("value", std::int64_t{0});
            bool witnessed = false;
            for (int32_t i = 0; i < records.count; ++i) {
                if (live(i) && records.data[i].best_rank > bar) witnessed = true;
            }
            if (!witnessed) {
                failures.push_back("rank_exceeds(" + std::to_string(bar) +
                                   ") never witnessed");
            }
        } else if (type == "rank_at_most") {
            const std::int64_t bar = a.value("value", std::int64_t{0});
            for (int32_t i = 0; i < records.count; ++i) {
                if (live(i) && records.data[i].best_rank > bar) {
                    failures.push_back("rank_at_most(" + std::to_string(bar) +
                                       ") violated at row " + std::to_string(i));
                }
            }
        } else if (type == "paired_max_le") {
            // Sweep rows pair up against the first row (shared trial seeds):
            // every later row's best_rank must not exceed row 0's.
            if (records.count >= 1 && live(0)) {
                for (int32_t i = 1; i < records.count; ++i) {
                    if (live(i) && records.data[i].best_rank > records.data[0].best_rank) {
                        failures.push_back("paired_max_le violated at row " +
                                           std::to_string(i));
                    }
                }
            }
        } else {
            die("unknown assertion type '" + type + "'");
        }
    }
    return failures;
}

int run_scaling(const ScalingOptions& opt) {
    const json config = load_json_file(opt.config_path);
    const std::string base_dir = fs::path(opt.config_path).parent_path().string();
    check_known_keys(config,
                     {"circuit", "family", "sweep", "partition", "trials", "seed",
                      "budget", "rank_tol", "assert"},
                     "scaling config");
    if (config.contains("sweep")) {
        check_known_keys(config.at("sweep"), {"axis", "values"}, "\"sweep\"");
    }
    if (config.contains("partition")) {
        check_known_keys(config.at("partition"),
                         {"kind", "a_size", "sites", "row", "col", "side"},
                         "\"partition\"");
    }

    CircuitPtr circuit = load_circuit(config, base_dir);

    const json sweep = config.value("sweep", json::object());
    const std::string axis = sweep.value("axis", "none");
    std::vector<std::int64_t> values;
    if (sweep.contains("values")) {
        values = sweep.at("values").get<std::vector<std::int64_t>>();
    }

    const json partition = config.value("partition", json{{"kind", "middle"}});
    const std::string pkind = partition.value("kind", "middle");

    tnac_sweep_config sc{};
    sc.base = circuit.get();
    sc.axis = parse_axis(axis);
    sc.values = values.data();
    sc.n_values = static_cast<int32_t>(values.size());
    std::vector<int32_t> sites;
    if (pkind == "middle") {
        sc.partition_kind = TNAC_PART_MIDDLE;
    } else if (pkind == "suffix" || pkind == "prefix") {
        sc.partition_kind = pkind == "suffix" ? TNAC_PART_SUFFIX : TNAC_PART_PREFIX;
        sc.a_size = partition.value("a_size", 1);
    } else if (pkind == "sites") {
        sc.partition_kind = TNAC_PART_SITES;
        for (int s : partition.value("sites", std::vector<int>{})) {
            sites.push_back(s - 1);  // config files number sites from 1
        }
        sc.sites = sites.data();
        sc.n_sites = static_cast<int32_t>(sites.size());
    } else if (pkind == "rect") {
        sc.partition_kind = TNAC_PART_RECT;
        sc.rect_row = partition.value("row", 1) - 1;
        sc.rect_col = partition.value("col", 1) - 1;
        sc.rect_side = partition.value("side", 1);
    } else {
        die("unknown partition kind '" + pkind + "'");
    }
    if (!opt.seed.has_value() && !config.contains("seed")) {
        die("a seed is mandatory: set \"seed\" in the config or pass --seed");
    }
    sc.trials = opt.trials.value_or(config.value("trials", 1));
    sc.seed = opt.seed.value_or(config.value("seed", std::uint64_t{0}));
    sc.budget = opt.budget.value_or(config.value("budget", std::int64_t{0}));
    sc.rank_tol = opt.tolerance.value_or(config.value("rank_tol", 0.0));

    if (opt.dry_run) {
        std::cout << "scaling\n";
        std::cout << "config: " << opt.config_path << "\n";
        std::cout << "axis: " << axis << " values:";
        for (auto v : values) std::cout << " " << v;
        std::cout << "\npartition: " << pkind << "\n";
        std::cout << "trials: " << sc.trials << " seed: " << sc.seed << "\n";
        std::cout << "rows: " << (values.empty() ? 1 : values.size()) << "\n";
        std::cout << "dry-run: no computation performed\n";
        return kExitOk;
    }

    RecordArray records;
    check(tnac_scaling_run(&sc, &records.data, &records.count), "running sweep");

    char* text_raw = nullptr;
    check(tnac_records_format(records.data, records.count,
                              opt.format == "json" ? TNAC_FORMAT_JSON : TNAC_FORMAT_CSV,
                              opt.timings ? 1 : 0, opt.bits ? 1 : 0, &text_raw),
          "formatting records");
    std::unique_ptr<char, decltype(&tnac_string_free)> text(text_raw, tnac_string_free);

    if (!opt.out_path.empty()) {
        write_text_file(opt.out_path, text.get());
        std::cout << "wrote " << records.count << " rows to " << opt.out_path << "\n";
    } else {
        std::cout << text.get();
    }

    const auto failures =
        evaluate_assertions(config.value("assert", json::array()), records);
    for (const auto& f : failures) std::cout << "assertion failed: " << f << "\n";
    std::cout << (failures.empty() ? "PASS" : "FAIL") << " ("
              << config.value("assert", json::array()).size() << " assertions)\n";
    return failures.empty() ? kExitOk : kExitAssertion;
}

// ---- export-network -------------------------------------------------------------

int run_export_network(const std::string& config_path, const std::string& out_path,
                       std::optional<std::uint64_t> seed, int leg_budget, bool dry_run) {
    if (dry_run) {
        std::cout << "export-network\nconfig: " << config_path << "\nout: " << out_path
                  << "\ndry-run: no computation performed\n";
        return kExitOk;
    }
    // The config is a circuit description file itself.
    tnac_circuit* raw = nullptr;
    check(tnac_circuit_read(config_path.c_str(), &raw),
          "loading circuit '" + config_path + "'");
    CircuitPtr circuit(raw, tnac_circuit_free);
    if (seed.has_value()) {
        check(tnac_circuit_randomize(circuit.get(), *seed), "drawing weights");
    }
    tnac_network* net_raw = nullptr;
    check(tnac_circuit_to_network(circuit.get(), leg_budget, &net_raw),
          "building equivalent network");
    NetworkPtr net(net_raw, tnac_network_free);
    check(tnac_network_write(net.get(), out_path.c_str()), "writing network");
    int32_t nodes = 0, externals = 0;
    check(tnac_network_num_nodes(net.get(), &nodes), "querying network");
    check(tnac_network_num_externals(net.get(), &externals), "querying network");
    std::cout << "wrote network (" << nodes << " nodes, " << externals
              << " external legs) to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor-network equivalents and entanglement scaling of arithmetic "
                 "circuits (lib version " +
                 std::string(tnac_version()) + ")"};
    app.require_subcommand(1);

    VerifyOptions verify;
    auto* cmd_verify = app.add_subcommand(
        "verify-equivalence",
        "check circuit amplitudes against the contracted network equivalent");
    cmd_verify->add_option("--config", verify.config_path, "JSON run configuration")
        ->required();
    int verify_trials = 0;
    std::uint64_t verify_seed = 0;
    double verify_tol = 0.0;
    std::int64_t verify_budget = 0;
    auto* vt = cmd_verify->add_option("--trials", verify_trials, "weight draws");
    auto* vs = cmd_verify->add_option("--seed", verify_seed, "master seed");
    auto* vo = cmd_verify->add_option("--tolerance", verify_tol, "max relative deviation");
    auto* vb = cmd_verify->add_option("--budget", verify_budget, "materialization budget");
    cmd_verify->add_option("--out", verify.out_path, "also write the report here");
    cmd_verify->add_flag("--dry-run", verify.dry_run, "print the plan and exit");

    std::int64_t nc_dim = 2;
    bool nc_dry = false;
    auto* cmd_nc = app.add_subcommand("no-cloning",
                                      "probe the forced order-3 cloning candidate");
    cmd_nc->add_option("--dim", nc_dim, "vector space dimension")->required();
    cmd_nc->add_flag("--dry-run", nc_dry, "print the plan and exit");

    ScalingOptions scaling;
    auto* cmd_scaling = app.add_subcommand(
        "scaling", "randomized max-entanglement sweeps with CSV/JSON output");
    cmd_scaling->add_option("--config", scaling.config_path, "JSON sweep configuration")
        ->required();
    cmd_scaling->add_option("--out", scaling.out_path, "output file (stdout if absent)");
    cmd_scaling->add_option("--format", scaling.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    int scaling_trials = 0;
    std::uint64_t scaling_seed = 0;
    std::int64_t scaling_budget = 0;
    double scaling_tol = 0.0;
    auto* st = cmd_scaling->add_option("--trials", scaling_trials, "draws per row");
    auto* ss = cmd_scaling->add_option("--seed", scaling_seed, "master seed");
    auto* sb = cmd_scaling->add_option("--budget", scaling_budget, "materialization budget");
    auto* so =
        cmd_scaling->add_option("--tolerance", scaling_tol, "Schmidt-rank tolerance");
    cmd_scaling->add_flag("--timings", scaling.timings,
                          "include wall_time_s (not byte-reproducible)");
    cmd_scaling->add_flag("--bits", scaling.bits, "report entropies in bits");
    cmd_scaling->add_flag("--dry-run", scaling.dry_run, "print the plan and exit");

    std::string export_config, export_out;
    std::uint64_t export_seed = 0;
    int export_leg_budget = 64;
    bool export_dry = false;
    auto* cmd_export = app.add_subcommand(
        "export-network", "write a circuit's equivalent network description file");
    cmd_export->add_option("--config", export_config, "circuit JSON file")->required();
    cmd_export->add_option("--out", export_out, "output network file")->required();
    auto* es = cmd_export->add_option("--seed", export_seed, "redraw weights first");
    cmd_export->add_option("--leg-budget", export_leg_budget, "raw external-leg budget");
    cmd_export->add_flag("--dry-run", export_dry, "print the plan and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cmd_verify->parsed()) {
            if (vt->count()) verify.trials = verify_trials;
            if (vs->count()) verify.seed = verify_seed;
            if (vo->count()) verify.tolerance = verify_tol;
            if (vb->count()) verify.budget = verify_budget;
            return run_verify(verify);
        }
        if (cmd_nc->parsed()) {
            if (nc_dim < 1) die("--dim must be >= 1");
            return run_no_cloning(nc_dim, nc_dry);
        }
        if (cmd_scaling->parsed()) {
            if (st->count()) scaling.trials = scaling_trials;
            if (ss->count()) scaling.seed = scaling_seed;
            if (sb->count()) scaling.budget = scaling_budget;
            if (so->count()) scaling.tolerance = scaling_tol;
            return run_scaling(scaling);
        }
        if (cmd_export->parsed()) {
            return run_export_network(
                export_config, export_out,
                es->count() ? std::optional<std::uint64_t>(export_seed) : std::nullopt,
                export_leg_budget, export_dry);
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
