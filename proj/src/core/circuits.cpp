#include "core/circuits.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace tnac {

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

std::vector<double> matvec(const DenseTensor& m, const std::vector<double>& x) {
    const auto rows = static_cast<std::size_t>(m.extent(0));
    const auto cols = static_cast<std::size_t>(m.extent(1));
    std::vector<double> y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += m[static_cast<std::int64_t>(i * cols + j)] * x[j];
        }
        y[i] = acc;
    }
    return y;
}

DenseTensor random_matrix(std::int64_t rows, std::int64_t cols, GaussianStream& g) {
    DenseTensor t({rows, cols});
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = g.next();
    return t;
}

DenseTensor random_vector(std::int64_t dim, GaussianStream& g) {
    DenseTensor t({dim});
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = g.next();
    return t;
}

// One stage of the convolutional stack as it acts on the spatial grid.
struct LayerOp {
    enum class Kind { conv, pool } kind;
    int conv_index;  // 0-based, meaningful for kind == conv
    int kernel;
    int stride;
    int in_extent;
    int out_extent;
};

std::vector<LayerOp> layer_ops(const ConvSpec& spec) {
    std::vector<LayerOp> ops;
    int extent = spec.alpha;
    for (int l = 0; l < spec.layers; ++l) {
        LayerOp conv{LayerOp::Kind::conv, l, spec.kernel, spec.stride, extent,
                     ceil_div(extent, spec.stride)};
        ops.push_back(conv);
        extent = conv.out_extent;
        if (spec.pool == 2 && l + 1 < spec.layers) {
            LayerOp pool{LayerOp::Kind::pool, -1, 2, 2, extent, ceil_div(extent, 2)};
            ops.push_back(pool);
            extent = pool.out_extent;
        }
    }
    return ops;
}

// Window source cells for `out_cell` of `op`, in window-slot order; -1 marks
// an out-of-bounds slot. Cells are row-major over extent^dims.
std::vector<int> window_sources(const LayerOp& op, int out_cell, int dims) {
    const int slots = static_cast<int>(ipow(op.kernel, dims));
    std::vector<int> src(static_cast<std::size_t>(slots), -1);
    const int out_row = dims == 2 ? out_cell / op.out_extent : out_cell;
    const int out_col = dims == 2 ? out_cell % op.out_extent : 0;
    for (int k = 0; k < slots; ++k) {
        const int off_row = dims == 2 ? k / op.kernel : k;
        const int off_col = dims == 2 ? k % op.kernel : 0;
        const int row = out_row * op.stride + off_row;
        const int col = out_col * op.stride + off_col;
        if (row >= op.in_extent || (dims == 2 && col >= op.in_extent)) continue;
        src[static_cast<std::size_t>(k)] = dims == 2 ? row * op.in_extent + col : row;
    }
    return src;
}

void entrywise_mul(std::vector<double>& acc, const std::vector<double>& v) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= v[i];
}

}  // namespace

int ConvSpec::n_sites() const { return static_cast<int>(ipow(alpha, dims)); }

void ConvSpec::validate() const {
    require(dims == 1 || dims == 2, ErrorCode::invalid_argument,
            "spatial dimensionality must be 1 or 2");
    require(alpha >= 1, ErrorCode::invalid_argument, "input extent must be >= 1");
    require(site_dim >= 1, ErrorCode::invalid_argument, "site dimension must be >= 1");
    require(kernel >= 1, ErrorCode::invalid_argument, "kernel size must be >= 1");
    require(stride == 1 || stride == kernel, ErrorCode::invalid_argument,
            "stride must be 1 (overlapping) or equal to the kernel size");
    require(pool == 1 || pool == 2, ErrorCode::invalid_argument, "pool must be 1 or 2");
    require(layers >= 1, ErrorCode::invalid_argument, "need at least one conv layer");
    require(static_cast<int>(widths.size()) == layers + 1, ErrorCode::invalid_argument,
            "widths must list r_0..r_L (" + std::to_string(layers + 1) + " entries)");
    for (auto w : widths) {
        require(w >= 1, ErrorCode::invalid_argument, "channel widths must be >= 1");
    }
    require(widths.front() == site_dim, ErrorCode::invalid_argument,
            "r_0 must equal the site dimension");
}

ConvWeights ConvWeights::random(const ConvSpec& spec, std::uint64_t seed) {
    spec.validate();
    GaussianStream g(seed);
    ConvWeights out;
    const int slots = static_cast<int>(ipow(spec.kernel, spec.dims));
    out.w.resize(static_cast<std::size_t>(spec.layers));
    for (int l = 0; l < spec.layers; ++l) {
        auto& layer = out.w[static_cast<std::size_t>(l)];
        layer.reserve(static_cast<std::size_t>(slots));
        for (int k = 0; k < slots; ++k) {
            layer.push_back(random_matrix(spec.widths[static_cast<std::size_t>(l) + 1],
                                          spec.widths[static_cast<std::size_t>(l)], g));
        }
    }
    out.head = random_vector(spec.widths.back(), g);
    return out;
}

void ConvWeights::validate(const ConvSpec& spec) const {
    const int slots = static_cast<int>(ipow(spec.kernel, spec.dims));
    require(static_cast<int>(w.size()) == spec.layers, ErrorCode::shape_mismatch,
            "weight layer count does not match spec");
    for (int l = 0; l < spec.layers; ++l) {
        const auto& layer = w[static_cast<std::size_t>(l)];
        require(static_cast<int>(layer.size()) == slots, ErrorCode::shape_mismatch,
                "conv layer " + std::to_string(l + 1) + " needs " + std::to_string(slots) +
                    " window matrices");
        for (const auto& m : layer) {
            require(m.order() == 2 &&
                        m.extent(0) == spec.widths[static_cast<std::size_t>(l) + 1] &&
                        m.extent(1) == spec.widths[static_cast<std::size_t>(l)],
                    ErrorCode::shape_mismatch,
                    "conv matrix shape mismatch in layer " + std::to_string(l + 1));
        }
    }
    require(head.order() == 1 && head.extent(0) == spec.widths.back(),
            ErrorCode::shape_mismatch, "output head shape mismatch");
}

void RacSpec::validate() const {
    require(seq_len >= 1, ErrorCode::invalid_argument, "sequence length must be >= 1");
    require(site_dim >= 1, ErrorCode::invalid_argument, "site dimension must be >= 1");
    require(hidden >= 1, ErrorCode::invalid_argument, "hidden dimension must be >= 1");
    require(layers == 1 || layers == 2, ErrorCode::invalid_argument,
            "recurrent depth must be 1 or 2");
}

RacWeights RacWeights::random(const RacSpec& spec, std::uint64_t seed) {
    spec.validate();
    GaussianStream g(seed);
    RacWeights out;
    for (int l = 0; l < spec.layers; ++l) {
        out.w_hidden.push_back(random_matrix(spec.hidden, spec.hidden, g));
        out.w_input.push_back(
            random_matrix(spec.hidden, l == 0 ? spec.site_dim : spec.hidden, g));
    }
    out.w_out = random_vector(spec.hidden, g);
    for (int l = 0; l < spec.layers; ++l) {
        DenseTensor ones({spec.hidden});
        for (std::int64_t i = 0; i < ones.size(); ++i) ones[i] = 1.0;
        out.h0.push_back(std::move(ones));
    }
    return out;
}

void RacWeights::validate(const RacSpec& spec) const {
    require(static_cast<int>(w_hidden.size()) == spec.layers &&
                static_cast<int>(w_input.size()) == spec.layers &&
                static_cast<int>(h0.size()) == spec.layers,
            ErrorCode::shape_mismatch, "recurrent weight layer count mismatch");
    for (int l = 0; l < spec.layers; ++l) {
        const auto& wh = w_hidden[static_cast<std::size_t>(l)];
        const auto& wi = w_input[static_cast<std::size_t>(l)];
        require(wh.order() == 2 && wh.extent(0) == spec.hidden && wh.extent(1) == spec.hidden,
                ErrorCode::shape_mismatch, "hidden matrix shape mismatch");
        const std::int64_t in_dim = l == 0 ? spec.site_dim : spec.hidden;
        require(wi.order() == 2 && wi.extent(0) == spec.hidden && wi.extent(1) == in_dim,
                ErrorCode::shape_mismatch, "input matrix shape mismatch");
        const auto& h = h0[static_cast<std::size_t>(l)];
        require(h.order() == 1 && h.extent(0) == spec.hidden, ErrorCode::shape_mismatch,
                "initial hidden state shape mismatch");
    }
    require(w_out.order() == 1 && w_out.extent(0) == spec.hidden, ErrorCode::shape_mismatch,
            "output weights shape mismatch");
}

void ProductSpec::validate() const {
    require(n >= 1, ErrorCode::invalid_argument, "need at least one site");
    require(site_dim >= 1, ErrorCode::invalid_argument, "site dimension must be >= 1");
}

ProductWeights ProductWeights::random(const ProductSpec& spec, std::uint64_t seed) {
    spec.validate();
    GaussianStream g(seed);
    ProductWeights out;
    for (int j = 0; j < spec.n; ++j) out.site.push_back(random_vector(spec.site_dim, g));
    return out;
}

void ProductWeights::validate(const ProductSpec& spec) const {
    require(static_cast<int>(site.size()) == spec.n, ErrorCode::shape_mismatch,
            "site vector count mismatch");
    for (const auto& v : site) {
        require(v.order() == 1 && v.extent(0) == spec.site_dim, ErrorCode::shape_mismatch,
                "site vector shape mismatch");
    }
}

namespace {

void check_config(const BasisConfig& c, int n, std::int64_t m) {
    require(static_cast<int>(c.s.size()) == n, ErrorCode::invalid_argument,
            "configuration lists " + std::to_string(c.s.size()) + " sites, expected " +
                std::to_string(n));
    for (auto v : c.s) {
        require(v >= 0 && v < m, ErrorCode::invalid_argument,
                "configuration entry out of range");
    }
}

}  // namespace

double cac_forward(const ConvSpec& spec, const ConvWeights& w, const BasisConfig& c) {
    spec.validate();
    w.validate(spec);
    check_config(c, spec.n_sites(), spec.site_dim);

    std::vector<std::vector<double>> cells(static_cast<std::size_t>(spec.n_sites()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
        cells[j].assign(static_cast<std::size_t>(spec.site_dim), 0.0);
        cells[j][static_cast<std::size_t>(c.s[j])] = 1.0;
    }

    for (const auto& op : layer_ops(spec)) {
        const int out_cells = static_cast<int>(ipow(op.out_extent, spec.dims));
        const std::int64_t out_width = op.kind == LayerOp::Kind::conv
                                           ? spec.widths[static_cast<std::size_t>(op.conv_index) + 1]
                                           : static_cast<std::int64_t>(cells.front().size());
        std::vector<std::vector<double>> next(static_cast<std::size_t>(out_cells));
        for (int cell = 0; cell < out_cells; ++cell) {
            std::vector<double> acc(static_cast<std::size_t>(out_width), 1.0);
            const auto sources = window_sources(op, cell, spec.dims);
            for (std::size_t k = 0; k < sources.size(); ++k) {
                if (sources[k] < 0) {
                    if (spec.padding == PaddingMode::strict_zero) {
                        std::fill(acc.begin(), acc.end(), 0.0);
                    }
                    continue;
                }
                const auto& src = cells[static_cast<std::size_t>(sources[k])];
                if (op.kind == LayerOp::Kind::conv) {
                    entrywise_mul(
                        acc, matvec(w.w[static_cast<std::size_t>(op.conv_index)][k], src));
                } else {
                    entrywise_mul(acc, src);
                }
            }
            next[static_cast<std::size_t>(cell)] = std::move(acc);
        }
        cells = std::move(next);
    }

    std::vector<double> pooled(static_cast<std::size_t>(spec.widths.back()), 1.0);
    for (const auto& cell : cells) entrywise_mul(pooled, cell);
    double y = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) y += w.head[static_cast<std::int64_t>(i)] * pooled[i];
    return y;
}

double rac_forward(const RacSpec& spec, const RacWeights& w, const BasisConfig& c) {
    spec.validate();
    w.validate(spec);
    check_config(c, spec.seq_len, spec.site_dim);

    std::vector<std::vector<double>> h(static_cast<std::size_t>(spec.layers));
    for (int l = 0; l < spec.layers; ++l) {
        const auto& init = w.h0[static_cast<std::size_t>(l)];
        h[static_cast<std::size_t>(l)].assign(init.data().begin(), init.data().end());
    }
    for (int t = 0; t < spec.seq_len; ++t) {
        std::vector<double> x(static_cast<std::size_t>(spec.site_dim), 0.0);
        x[static_cast<std::size_t>(c.s[static_cast<std::size_t>(t)])] = 1.0;
        for (int l = 0; l < spec.layers; ++l) {
            const auto& input = l == 0 ? x : h[static_cast<std::size_t>(l) - 1];
            auto next = matvec(w.w_hidden[static_cast<std::size_t>(l)],
                               h[static_cast<std::size_t>(l)]);
            entrywise_mul(next, matvec(w.w_input[static_cast<std::size_t>(l)], input));
            h[static_cast<std::size_t>(l)] = std::move(next);
        }
    }
    double y = 0.0;
    const auto& top = h[static_cast<std::size_t>(spec.layers) - 1];
    for (std::size_t i = 0; i < top.size(); ++i) {
        y += w.w_out[static_cast<std::int64_t>(i)] * top[i];
    }
    return y;
}

double product_forward(const ProductSpec& spec, const ProductWeights& w,
                       const BasisConfig& c) {
    spec.validate();
    w.validate(spec);
    check_config(c, spec.n, spec.site_dim);
    double y = 1.0;
    for (int j = 0; j < spec.n; ++j) {
        y *= w.site[static_cast<std::size_t>(j)][c.s[static_cast<std::size_t>(j)]];
    }
    return y;
}

DenseTensor materialize(const std::function<double(const BasisConfig&)>& amplitude, int n,
                        std::int64_t site_dim, std::int64_t budget) {
    require(n >= 1 && site_dim >= 1, ErrorCode::invalid_argument,
            "materialize needs n >= 1 sites of dimension >= 1");
    double entries = std::pow(static_cast<double>(site_dim), n);
    require(entries <= static_cast<double>(budget), ErrorCode::budget_exceeded,
            "materialization needs " + std::to_string(entries) + " entries, budget is " +
                std::to_string(budget));

    DenseTensor out(std::vector<std::int64_t>(static_cast<std::size_t>(n), site_dim));
    BasisConfig cfg;
    cfg.s.assign(static_cast<std::size_t>(n), 0);
    for (std::int64_t flat = 0; flat < out.size(); ++flat) {
        out[flat] = amplitude(cfg);
        for (int axis = n - 1; axis >= 0; --axis) {
            auto ua = static_cast<std::size_t>(axis);
            if (++cfg.s[ua] < site_dim) break;
            cfg.s[ua] = 0;
        }
    }
    return out;
}

std::int64_t param_count(const ConvSpec& spec) {
    spec.validate();
    const std::int64_t slots = ipow(spec.kernel, spec.dims);
    std::int64_t count = 0;
    for (int l = 0; l < spec.layers; ++l) {
        count += slots * spec.widths[static_cast<std::size_t>(l) + 1] *
                 spec.widths[static_cast<std::size_t>(l)];
    }
    return count + spec.widths.back();
}

int total_receptive_field(const ConvSpec& spec, int layer) {
    spec.validate();
    require(layer >= 1 && layer <= spec.layers, ErrorCode::invalid_argument,
            "layer index out of range");
    int field = 1;
    int jump = 1;
    for (const auto& op : layer_ops(spec)) {
        field += (op.kernel - 1) * jump;
        jump *= op.stride;
        if (op.kind == LayerOp::Kind::conv && op.conv_index == layer - 1) break;
    }
    return field;
}

int total_stride(const ConvSpec& spec, int layer) {
    spec.validate();
    require(layer >= 1 && layer <= spec.layers, ErrorCode::invalid_argument,
            "layer index out of range");
    int jump = 1;
    for (const auto& op : layer_ops(spec)) {
        jump *= op.stride;
        if (op.kind == LayerOp::Kind::conv && op.conv_index == layer - 1) break;
    }
    return jump;
}

std::vector<std::int64_t> input_path_counts(const ConvSpec& spec) {
    spec.validate();
    const auto ops = layer_ops(spec);
    // Counts at the top grid: the global pooling consumes each cell once.
    std::vector<std::int64_t> counts(
        static_cast<std::size_t>(ipow(ops.back().out_extent, spec.dims)), 1);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        std::vector<std::int64_t> below(
            static_cast<std::size_t>(ipow(it->in_extent, spec.dims)), 0);
        const int out_cells = static_cast<int>(counts.size());
        for (int cell = 0; cell < out_cells; ++cell) {
            for (int src : window_sources(*it, cell, spec.dims)) {
                if (src >= 0) below[static_cast<std::size_t>(src)] += counts[static_cast<std::size_t>(cell)];
            }
        }
        counts = std::move(below);
    }
    return counts;
}

std::vector<std::int64_t> input_path_counts(const RacSpec& spec) {
    spec.validate();
    // Top layer: h_t feeds only h_{t+1}, so its consumption count is 1 at
    // every step. Each lower layer's h_t additionally feeds the layer above.
    std::vector<std::int64_t> counts(static_cast<std::size_t>(spec.seq_len), 1);
    for (int l = spec.layers - 1; l >= 1; --l) {
        std::vector<std::int64_t> below(static_cast<std::size_t>(spec.seq_len), 0);
        std::int64_t chain = 0;  // paths through h^{l-1}_{t+1}
        for (int t = spec.seq_len - 1; t >= 0; --t) {
            below[static_cast<std::size_t>(t)] =
                chain + counts[static_cast<std::size_t>(t)];
            chain = below[static_cast<std::size_t>(t)];
        }
        counts = std::move(below);
    }
    return counts;
}

std::vector<int> reachable_input_cells(const ConvSpec& spec, int layer, int out_cell) {
    spec.validate();
    require(layer >= 1 && layer <= spec.layers, ErrorCode::invalid_argument,
            "layer index out of range");
    auto ops = layer_ops(spec);
    while (!(ops.back().kind == LayerOp::Kind::conv && ops.back().conv_index == layer - 1)) {
        ops.pop_back();
    }
    require(out_cell >= 0 && out_cell < static_cast<int>(ipow(ops.back().out_extent, spec.dims)),
            ErrorCode::invalid_argument, "output cell out of range");

    std::vector<char> marked(static_cast<std::size_t>(ipow(ops.back().out_extent, spec.dims)), 0);
    marked[static_cast<std::size_t>(out_cell)] = 1;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        std::vector<char> below(static_cast<std::size_t>(ipow(it->in_extent, spec.dims)), 0);
        for (int cell = 0; cell < static_cast<int>(marked.size()); ++cell) {
            if (!marked[static_cast<std::size_t>(cell)]) continue;
            for (int src : window_sources(*it, cell, spec.dims)) {
                if (src >= 0) below[static_cast<std::size_t>(src)] = 1;
            }
        }
        marked = std::move(below);
    }
    std::vector<int> cells;
    for (int j = 0; j < static_cast<int>(marked.size()); ++j) {
        if (marked[static_cast<std::size_t>(j)]) cells.push_back(j);
    }
    return cells;
}

int n_sites(const Circuit& c) {
    return std::visit(
        [](const auto& circuit) -> int {
            using T = std::decay_t<decltype(circuit)>;
            if constexpr (std::is_same_v<T, ConvCircuit>) {
                return circuit.spec.n_sites();
            } else if constexpr (std::is_same_v<T, RacCircuit>) {
                return circuit.spec.seq_len;
            } else {
                return circuit.spec.n;
            }
        },
        c);
}

std::int64_t site_dim(const Circuit& c) {
    return std::visit([](const auto& circuit) { return circuit.spec.site_dim; }, c);
}

std::string circuit_kind(const Circuit& c) {
    return std::visit(
        [](const auto& circuit) -> std::string {
            using T = std::decay_t<decltype(circuit)>;
            if constexpr (std::is_same_v<T, ConvCircuit>) {
                (void)circuit;
                return "conv";
            } else if constexpr (std::is_same_v<T, RacCircuit>) {
                return "rac";
            } else {
                return "product";
            }
        },
        c);
}

void randomize(Circuit& c, std::uint64_t seed) {
    std::visit(
        [seed](auto& circuit) {
            using T = std::decay_t<decltype(circuit)>;
            if constexpr (std::is_same_v<T, ConvCircuit>) {
                circuit.weights = ConvWeights::random(circuit.spec, seed);
            } else if constexpr (std::is_same_v<T, RacCircuit>) {
                circuit.weights = RacWeights::random(circuit.spec, seed);
            } else {
                circuit.weights = ProductWeights::random(circuit.spec, seed);
            }
        },
        c);
}

double forward(const Circuit& c, const BasisConfig& cfg) {
    return std::visit(
        [&cfg](const auto& circuit) -> double {
            using T = std::decay_t<decltype(circuit)>;
            if constexpr (std::is_same_v<T, ConvCircuit>) {
                return cac_forward(circuit.spec, circuit.weights, cfg);
            } else if constexpr (std::is_same_v<T, RacCircuit>) {
                return rac_forward(circuit.spec, circuit.weights, cfg);
            } else {
                return product_forward(circuit.spec, circuit.weights, cfg);
            }
        },
        c);
}

DenseTensor materialize(const Circuit& c, std::int64_t budget) {
    return materialize([&c](const BasisConfig& cfg) { return forward(c, cfg); }, n_sites(c),
                       site_dim(c), budget);
}

}  // namespace tnac
