#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "core/tensor.hpp"

namespace tnac {

// Edge handling for convolution windows that reach past the input boundary.
// `identity`: out-of-bounds positions are skipped, i.e. contribute the
// multiplicative identity to the product-pooled window. This keeps edge
// outputs nonzero and is the default. `strict_zero`: out-of-bounds positions
// contribute a zero vector, which annihilates any product they feed.
enum class PaddingMode { identity, strict_zero };

// Convolutional arithmetic circuit: L conv layers of kernel K and stride S
// (S == K: disjoint windows; S == 1: overlapping windows), optional product
// pooling of linear size 2 between conv layers, a global product pooling over
// the remaining extent, and a linear output head. All mixing is entrywise
// multiplication, so the network computes a polynomial in its inputs.
struct ConvSpec {
    int dims = 1;                      // spatial dimensionality, 1 or 2
    int alpha = 0;                     // linear input extent; N = alpha^dims
    std::int64_t site_dim = 0;         // input vector dimension M
    int kernel = 0;                    // K
    int stride = 0;                    // S, 1 or K
    int pool = 1;                      // P, 1 (none) or 2 (decimating)
    int layers = 0;                    // L >= 1
    std::vector<std::int64_t> widths;  // r_0..r_L, r_0 == site_dim
    PaddingMode padding = PaddingMode::identity;

    int n_sites() const;
    void validate() const;
};

struct ConvWeights {
    // w[l][k]: the matrix applied to window slot k (row-major over the K^d
    // window) of conv layer l; shape widths[l+1] x widths[l].
    std::vector<std::vector<DenseTensor>> w;
    DenseTensor head;  // widths[L]

    // i.i.d. standard normal entries; draw order is layers outward-in, then
    // window slots, then row-major matrix entries, then the head.
    static ConvWeights random(const ConvSpec& spec, std::uint64_t seed);
    void validate(const ConvSpec& spec) const;
};

// Recurrent arithmetic circuit with multiplicative integration
// h_t = (W_h h_{t-1}) .* (W_x x_t), one or two stacked layers, scalar output
// w_out . h_N of the top layer.
struct RacSpec {
    int seq_len = 0;            // N
    std::int64_t site_dim = 0;  // M
    std::int64_t hidden = 0;    // R
    int layers = 1;             // 1 (shallow) or 2 (deep)

    void validate() const;
};

struct RacWeights {
    std::vector<DenseTensor> w_hidden;  // per layer, R x R
    std::vector<DenseTensor> w_input;   // layer 0: R x M, layer 1: R x R
    DenseTensor w_out;                  // R
    std::vector<DenseTensor> h0;        // per layer, R; defaults to all-ones

    // Draw order: (w_hidden, w_input) per layer, then w_out. Initial hidden
    // states stay at all-ones (the identity of the entrywise product).
    static RacWeights random(const RacSpec& spec, std::uint64_t seed);
    void validate(const RacSpec& spec) const;
};

// Degenerate fully factorized family: y = prod_j site[j][s_j]. Its tensor is
// an outer product, hence carries zero entanglement across any partition.
struct ProductSpec {
    int n = 0;
    std::int64_t site_dim = 0;

    void validate() const;
};

struct ProductWeights {
    std::vector<DenseTensor> site;  // n vectors of length site_dim

    static ProductWeights random(const ProductSpec& spec, std::uint64_t seed);
    void validate(const ProductSpec& spec) const;
};

// One standard-basis input assignment: s[j] in [0, M) selects the one-hot
// vector fed to site j (row-major site order in 2D).
struct BasisConfig {
    std::vector<std::int64_t> s;
};

double cac_forward(const ConvSpec& spec, const ConvWeights& w, const BasisConfig& c);
double rac_forward(const RacSpec& spec, const RacWeights& w, const BasisConfig& c);
double product_forward(const ProductSpec& spec, const ProductWeights& w,
                       const BasisConfig& c);

inline constexpr std::int64_t kDefaultMaterializeBudget = std::int64_t{1} << 20;

// Order-n tensor of all M^n amplitudes, configurations enumerated
// lexicographically. Rejects instances whose entry count exceeds the budget.
DenseTensor materialize(const std::function<double(const BasisConfig&)>& amplitude, int n,
                        std::int64_t site_dim,
                        std::int64_t budget = kDefaultMaterializeBudget);

// Total number of weight entries including the output head.
std::int64_t param_count(const ConvSpec& spec);

// Projections of conv layer `layer` (1-based) onto the input, composed
// through all earlier conv and pooling layers.
int total_receptive_field(const ConvSpec& spec, int layer);
int total_stride(const ConvSpec& spec, int layer);

// Number of distinct computational paths from the scalar output down to each
// input site; >1 means the site's data is re-used along the way.
std::vector<std::int64_t> input_path_counts(const ConvSpec& spec);
std::vector<std::int64_t> input_path_counts(const RacSpec& spec);

// Input cells (flattened, row-major) reachable from one output cell of conv
// layer `layer`; the dependency-trace ground truth for receptive fields.
std::vector<int> reachable_input_cells(const ConvSpec& spec, int layer,
                                       int out_cell);

struct ConvCircuit {
    ConvSpec spec;
    ConvWeights weights;
};

struct RacCircuit {
    RacSpec spec;
    RacWeights weights;
};

struct ProductCircuit {
    ProductSpec spec;
    ProductWeights weights;
};

using Circuit = std::variant<ConvCircuit, RacCircuit, ProductCircuit>;

int n_sites(const Circuit& c);
std::int64_t site_dim(const Circuit& c);
std::string circuit_kind(const Circuit& c);  // "conv" | "rac" | "product"
void randomize(Circuit& c, std::uint64_t seed);
double forward(const Circuit& c, const BasisConfig& cfg);
DenseTensor materialize(const Circuit& c, std::int64_t budget = kDefaultMaterializeBudget);

}  // namespace tnac
