#include "core/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "core/rng.hpp"
#include "core/tensor_io.hpp"

namespace tnac {

double conv_overlap_capacity(double alpha, int dims, double layers, double kernel) {
    require(alpha >= 1 && layers >= 1 && kernel >= 1, ErrorCode::invalid_argument,
            "capacity arguments must be >= 1");
    require(dims == 1 || dims == 2, ErrorCode::invalid_argument, "dims must be 1 or 2");
    const double volume = std::pow(alpha, dims);
    const double boundary = layers * kernel * std::pow(alpha, dims - 1);
    return std::min(volume, boundary);
}

double conv_pooling_capacity(double alpha, int dims, double kernel) {
    return conv_overlap_capacity(alpha, dims, 1.0, kernel);
}

double log_binomial(std::int64_t n, std::int64_t k) {
    require(n >= 0 && k >= 0 && k <= n, ErrorCode::invalid_argument,
            "log_binomial needs 0 <= k <= n");
    k = std::min(k, n - k);
    double log_c = 0.0;
    for (std::int64_t i = 1; i <= k; ++i) {
        log_c += std::log(static_cast<double>(n - k + i)) - std::log(static_cast<double>(i));
    }
    return log_c;
}

double rac_depth_capacity(std::int64_t a_size, std::int64_t hidden, std::int64_t site_dim) {
    require(a_size >= 1 && hidden >= 1 && site_dim >= 1, ErrorCode::invalid_argument,
            "capacity arguments must be >= 1");
    const std::int64_t base = std::min(hidden, site_dim);
    return log_binomial(base + a_size - 1, a_size);
}

std::string PartitionRule::describe() const {
    switch (kind) {
        case Kind::suffix:
            return "suffix:" + std::to_string(a_size);
        case Kind::prefix:
            return "prefix:" + std::to_string(a_size);
        case Kind::middle:
            return "middle";
        case Kind::sites: {
            std::string s = "sites:";
            for (std::size_t i = 0; i < sites.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(sites[i]);
            }
            return s;
        }
        case Kind::rect:
            return "rect:" + std::to_string(rect_row) + "," + std::to_string(rect_col) +
                   "," + std::to_string(rect_side);
    }
    fail(ErrorCode::internal, "unhandled partition kind");
}

Partition resolve_partition(const PartitionRule& rule, int n_sites, int alpha, int dims,
                            std::int64_t site_dim) {
    switch (rule.kind) {
        case PartitionRule::Kind::suffix:
            return Partition::suffix(rule.a_size, n_sites, site_dim);
        case PartitionRule::Kind::prefix:
            return Partition::prefix(rule.a_size, n_sites, site_dim);
        case PartitionRule::Kind::middle:
            return Partition::suffix(n_sites / 2, n_sites, site_dim);
        case PartitionRule::Kind::sites: {
            std::vector<int> a;
            for (int s : rule.sites) a.push_back(s - 1);  // descriptors are 1-based
            return Partition::from_a_sites(std::move(a), n_sites, site_dim);
        }
        case PartitionRule::Kind::rect: {
            require(dims == 2, ErrorCode::invalid_argument,
                    "rect partitions apply to 2D circuits only");
            const int row0 = rule.rect_row - 1;  // descriptors are 1-based
            const int col0 = rule.rect_col - 1;
            require(rule.rect_side >= 1 && row0 >= 0 && col0 >= 0 &&
                        row0 + rule.rect_side <= alpha && col0 + rule.rect_side <= alpha,
                    ErrorCode::invalid_argument, "rect block out of range");
            std::vector<int> a;
            for (int r = row0; r < row0 + rule.rect_side; ++r) {
                for (int c = col0; c < col0 + rule.rect_side; ++c) {
                    a.push_back(r * alpha + c);
                }
            }
            return Partition::from_a_sites(std::move(a), n_sites, site_dim);
        }
    }
    fail(ErrorCode::internal, "unhandled partition kind");
}

namespace {

void fill_family_fields(ScalingRecord& rec, const Circuit& family) {
    rec.kind = circuit_kind(family);
    if (const auto* conv = std::get_if<ConvCircuit>(&family)) {
        rec.dims = conv->spec.dims;
        rec.n = conv->spec.n_sites();
        rec.alpha = conv->spec.alpha;
        rec.site_dim = conv->spec.site_dim;
        rec.kernel = conv->spec.kernel;
        rec.stride = conv->spec.stride;
        rec.pool = conv->spec.pool;
        rec.layers = conv->spec.layers;
    } else if (const auto* rac = std::get_if<RacCircuit>(&family)) {
        rec.dims = 1;
        rec.n = rac->spec.seq_len;
        rec.site_dim = rac->spec.site_dim;
        rec.layers = rac->spec.layers;
        rec.hidden = rac->spec.hidden;
    } else if (const auto* prod = std::get_if<ProductCircuit>(&family)) {
        rec.dims = 1;
        rec.n = prod->spec.n;
        rec.site_dim = prod->spec.site_dim;
    }
}

double family_bound(const Circuit& family, int a_size) {
    if (const auto* conv = std::get_if<ConvCircuit>(&family)) {
        const double a_side =
            conv->spec.dims == 2 ? std::sqrt(static_cast<double>(a_size))
                                 : static_cast<double>(a_size);
        if (conv->spec.stride == 1) {
            return conv->spec.pool == 2
                       ? conv_pooling_capacity(a_side, conv->spec.dims, conv->spec.kernel)
                       : conv_overlap_capacity(a_side, conv->spec.dims, conv->spec.layers,
                                               conv->spec.kernel);
        }
        // Non-overlapping tree: the middle cut crosses a single top-level
        // bond, capping the entropy at ln(top width).
        return std::log(static_cast<double>(conv->spec.widths.back()));
    }
    if (const auto* rac = std::get_if<RacCircuit>(&family)) {
        if (rac->spec.layers == 1) {
            return std::log(static_cast<double>(rac->spec.hidden));
        }
        return rac_depth_capacity(a_size, rac->spec.hidden, rac->spec.site_dim);
    }
    return 0.0;
}

}  // namespace

ScalingRecord max_ee_estimate(const Circuit& family, const Partition& partition,
                              const std::string& partition_desc, int trials,
                              std::uint64_t seed, std::int64_t budget, double rank_tol) {
    require(trials >= 1, ErrorCode::invalid_argument, "need at least one trial");
    const auto start = std::chrono::steady_clock::now();

    ScalingRecord rec;
    fill_family_fields(rec, family);
    rec.partition = partition_desc;
    rec.a_size = static_cast<int>(partition.a_sites.size());
    rec.trials = trials;
    rec.seed = seed;
    rec.bound_value = family_bound(family, rec.a_size);

    Circuit instance = family;
    for (int trial = 0; trial < trials; ++trial) {
        randomize(instance, mix_seed(seed, static_cast<std::uint64_t>(trial)));
        const DenseTensor t = materialize(instance, budget);
        if (t.is_zero()) continue;  // zero state carries no entanglement
        rec.best_ee = std::max(rec.best_ee, entanglement_entropy(t, partition));
        rec.best_rank = std::max(rec.best_rank, schmidt_rank(t, partition, rank_tol));
    }
    if (rec.best_rank == 0) rec.best_rank = 1;  // rank floor for reporting

    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

namespace {

Circuit instantiate(const Circuit& base, ExperimentConfig::Axis axis, std::int64_t value) {
    Circuit c = base;
    switch (axis) {
        case ExperimentConfig::Axis::none:
        case ExperimentConfig::Axis::a_size:
            break;
        case ExperimentConfig::Axis::depth: {
            auto* conv = std::get_if<ConvCircuit>(&c);
            require(conv != nullptr, ErrorCode::invalid_argument,
                    "depth sweeps apply to conv circuits");
            require(value >= 1, ErrorCode::invalid_argument, "depth must be >= 1");
            // Replicate the first hidden width across the new depth.
            const std::int64_t width =
                conv->spec.widths.size() > 1 ? conv->spec.widths[1] : conv->spec.site_dim;
            conv->spec.layers = static_cast<int>(value);
            conv->spec.widths.assign(static_cast<std::size_t>(value) + 1, width);
            conv->spec.widths[0] = conv->spec.site_dim;
            break;
        }
        case ExperimentConfig::Axis::pool: {
            auto* conv = std::get_if<ConvCircuit>(&c);
            require(conv != nullptr, ErrorCode::invalid_argument,
                    "pooling sweeps apply to conv circuits");
            require(value == 1 || value == 2, ErrorCode::invalid_argument,
                    "pool values must be 1 or 2");
            conv->spec.pool = static_cast<int>(value);
            break;
        }
    }
    return c;
}

}  // namespace

std::vector<ScalingRecord> scaling_experiment(const ExperimentConfig& config) {
    require(config.trials >= 1, ErrorCode::invalid_argument, "need at least one trial");
    std::vector<std::int64_t> values = config.values;
    if (config.axis == ExperimentConfig::Axis::none && values.empty()) values.push_back(0);

    std::vector<ScalingRecord> records;
    for (std::int64_t value : values) {
        const Circuit instance = instantiate(config.base, config.axis, value);
        PartitionRule rule = config.partition;
        if (config.axis == ExperimentConfig::Axis::a_size) {
            require(rule.kind == PartitionRule::Kind::suffix ||
                        rule.kind == PartitionRule::Kind::prefix ||
                        rule.kind == PartitionRule::Kind::middle,
                    ErrorCode::invalid_argument,
                    "a_size sweeps need a suffix or prefix partition rule");
            if (rule.kind == PartitionRule::Kind::middle) {
                rule.kind = PartitionRule::Kind::suffix;
            }
            rule.a_size = static_cast<int>(value);
        }

        const int n = n_sites(instance);
        int alpha = 0;
        int dims = 1;
        if (const auto* conv = std::get_if<ConvCircuit>(&instance)) {
            alpha = conv->spec.alpha;
            dims = conv->spec.dims;
        }

        try {
            const Partition p = resolve_partition(rule, n, alpha, dims, site_dim(instance));
            records.push_back(max_ee_estimate(instance, p, rule.describe(), config.trials,
                                              config.seed, config.budget, config.rank_tol));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::budget_exceeded) throw;
            ScalingRecord rec;
            fill_family_fields(rec, instance);
            rec.partition = rule.describe();
            rec.a_size = rule.kind == PartitionRule::Kind::suffix ||
                                 rule.kind == PartitionRule::Kind::prefix
                             ? rule.a_size
                             : 0;
            rec.trials = config.trials;
            rec.seed = config.seed;
            rec.skipped = true;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

namespace {

constexpr double kNatsPerBit = 0.6931471805599453;  // ln 2

std::string csv_cell_int(std::int64_t v, bool applicable) {
    return applicable ? std::to_string(v) : std::string();
}

}  // namespace

std::string records_to_csv(const std::vector<ScalingRecord>& records,
                           const RecordFormat& fmt) {
    std::ostringstream os;
    os << "index,kind,dims,n,alpha,site_dim,kernel,stride,pool,layers,hidden,partition,"
          "a_size,trials,seed,best_ee,best_rank,bound,skipped";
    if (fmt.timings) os << ",wall_time_s";
    os << "\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const bool conv = r.kind == "conv";
        const bool rac = r.kind == "rac";
        const double ee = fmt.bits ? r.best_ee / kNatsPerBit : r.best_ee;
        os << i << "," << r.kind << "," << r.dims << "," << r.n << ","
           << csv_cell_int(r.alpha, conv) << "," << r.site_dim << ","
           << csv_cell_int(r.kernel, conv) << "," << csv_cell_int(r.stride, conv) << ","
           << csv_cell_int(r.pool, conv) << "," << csv_cell_int(r.layers, conv || rac)
           << "," << csv_cell_int(r.hidden, rac) << "," << r.partition << "," << r.a_size
           << "," << r.trials << "," << r.seed << ",";
        if (r.skipped) {
            os << ",,," << "1";
        } else {
            os << format_double(ee) << "," << r.best_rank << "," << format_double(r.bound_value)
               << ",0";
        }
        if (fmt.timings) os << "," << format_double(r.wall_time_s);
        os << "\n";
    }
    return os.str();
}

std::string records_to_json(const std::vector<ScalingRecord>& records,
                            const RecordFormat& fmt) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const bool conv = r.kind == "conv";
        const bool rac = r.kind == "rac";
        nlohmann::json row;
        row["index"] = i;
        row["kind"] = r.kind;
        row["dims"] = r.dims;
        row["n"] = r.n;
        row["alpha"] = conv ? nlohmann::json(r.alpha) : nlohmann::json();
        row["site_dim"] = r.site_dim;
        row["kernel"] = conv ? nlohmann::json(r.kernel) : nlohmann::json();
        row["stride"] = conv ? nlohmann::json(r.stride) : nlohmann::json();
        row["pool"] = conv ? nlohmann::json(r.pool) : nlohmann::json();
        row["layers"] = conv || rac ? nlohmann::json(r.layers) : nlohmann::json();
        row["hidden"] = rac ? nlohmann::json(r.hidden) : nlohmann::json();
        row["partition"] = r.partition;
        row["a_size"] = r.a_size;
        row["trials"] = r.trials;
        row["seed"] = r.seed;
        if (r.skipped) {
            row["best_ee"] = nullptr;
            row["best_rank"] = nullptr;
            row["bound"] = nullptr;
        } else {
            row["best_ee"] = fmt.bits ? r.best_ee / kNatsPerBit : r.best_ee;
            row["best_rank"] = r.best_rank;
            row["bound"] = r.bound_value;
        }
        row["skipped"] = r.skipped;
        if (fmt.timings) row["wall_time_s"] = r.wall_time_s;
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

}  // namespace tnac
