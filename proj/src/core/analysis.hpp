#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/circuits.hpp"
#include "core/tensor.hpp"

namespace tnac {

// Reference scales for the maximal entanglement each family can support.
// The first two are capacity scales for overlapping conv circuits (with and
// without decimating pooling); the third is the log-binomial floor for the
// depth-2 recurrent family, ln C(min(R,M) + |A| - 1, |A|).
double conv_overlap_capacity(double alpha, int dims, double layers, double kernel);
double conv_pooling_capacity(double alpha, int dims, double kernel);
double rac_depth_capacity(std::int64_t a_size, std::int64_t hidden, std::int64_t site_dim);

// ln C(n, k) computed by a multiplicative product, exact to double rounding
// for desk-scale arguments.
double log_binomial(std::int64_t n, std::int64_t k);

// One row of a randomized max-entanglement estimate. best_ee/best_rank are
// maxima over the sampled weight draws, hence lower bounds on the true
// maximum over all weights. Fields that do not apply to the family are 0.
struct ScalingRecord {
    std::string kind;  // conv | rac | product
    int dims = 0;
    int n = 0;
    int alpha = 0;
    std::int64_t site_dim = 0;
    int kernel = 0;
    int stride = 0;
    int pool = 0;
    int layers = 0;
    std::int64_t hidden = 0;
    std::string partition;  // descriptor, e.g. "suffix:4"
    int a_size = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double best_ee = 0.0;
    std::int64_t best_rank = 0;
    double bound_value = 0.0;
    double wall_time_s = 0.0;
    bool skipped = false;
};

// Draws `trials` independent weight settings (streams derived from `seed` by
// trial index), materializes each amplitude tensor, and records the largest
// entanglement entropy and Schmidt rank seen across the partition.
ScalingRecord max_ee_estimate(const Circuit& family, const Partition& partition,
                              const std::string& partition_desc, int trials,
                              std::uint64_t seed,
                              std::int64_t budget = kDefaultMaterializeBudget,
                              double rank_tol = kDefaultRankTol);

struct PartitionRule {
    enum class Kind { suffix, prefix, middle, sites, rect };
    Kind kind = Kind::middle;
    int a_size = 0;           // suffix / prefix
    std::vector<int> sites;   // explicit 1-based site list
    int rect_row = 0, rect_col = 0, rect_side = 0;  // 2D square block, 1-based corner

    std::string describe() const;
};

Partition resolve_partition(const PartitionRule& rule, int n_sites, int alpha, int dims,
                            std::int64_t site_dim);

struct ExperimentConfig {
    Circuit base;
    enum class Axis { none, a_size, depth, pool } axis = Axis::none;
    std::vector<std::int64_t> values;  // one record per value; empty + axis none = 1 row
    PartitionRule partition;
    int trials = 1;
    std::uint64_t seed = 0;
    std::int64_t budget = kDefaultMaterializeBudget;
    double rank_tol = kDefaultRankTol;
};

// Sweeps the grid in declared order. Rows whose instance exceeds the budget
// are marked skipped and the sweep continues. All rows of a sweep share the
// per-trial weight streams, so paired comparisons across rows see identical
// draws. Deterministic given (config, seed).
std::vector<ScalingRecord> scaling_experiment(const ExperimentConfig& config);

struct RecordFormat {
    bool timings = false;   // include wall_time_s (breaks byte-reproducibility)
    bool bits = false;      // report best_ee in bits instead of nats
};

// CSV with one header row; column order is fixed and documented in the README.
std::string records_to_csv(const std::vector<ScalingRecord>& records,
                           const RecordFormat& fmt = {});
// JSON array of objects mirroring the CSV fields by name.
std::string records_to_json(const std::vector<ScalingRecord>& records,
                            const RecordFormat& fmt = {});

}  // namespace tnac
