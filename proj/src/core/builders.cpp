#include "core/builders.hpp"

#include <algorithm>

namespace tnac {

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Node tensor of one conv window: leg 0 is the output channel, legs 1..q the
// inputs of the in-bounds slots, entrywise the product of the slot matrices.
// Under strict-zero padding a clipped window annihilates its product, so the
// node collapses to the zero tensor.
DenseTensor conv_node(const ConvSpec& spec, const ConvWeights& w, int conv_index,
                      const std::vector<int>& slots, bool clipped) {
    const std::int64_t r_out = spec.widths[static_cast<std::size_t>(conv_index) + 1];
    const std::int64_t r_in = spec.widths[static_cast<std::size_t>(conv_index)];
    std::vector<std::int64_t> shape{r_out};
    shape.insert(shape.end(), slots.size(), r_in);
    DenseTensor node(shape);
    if (clipped && spec.padding == PaddingMode::strict_zero) return node;

    std::vector<std::int64_t> idx(shape.size(), 0);
    for (std::int64_t flat = 0; flat < node.size(); ++flat) {
        double v = 1.0;
        for (std::size_t t = 0; t < slots.size(); ++t) {
            const auto& m = w.w[static_cast<std::size_t>(conv_index)]
                               [static_cast<std::size_t>(slots[t])];
            v *= m.at({idx[0], idx[t + 1]});
        }
        node[flat] = v;
        for (int axis = static_cast<int>(shape.size()) - 1; axis >= 0; --axis) {
            auto ua = static_cast<std::size_t>(axis);
            if (++idx[ua] < shape[ua]) break;
            idx[ua] = 0;
        }
    }
    return node;
}

// Product-pooling node over q inputs: the delta tensor (leg 0 out).
DenseTensor pool_node(std::int64_t width, int q, bool clipped, PaddingMode padding) {
    if (clipped && padding == PaddingMode::strict_zero) {
        return DenseTensor(std::vector<std::int64_t>(static_cast<std::size_t>(q) + 1, width));
    }
    return DenseTensor::delta(q + 1, width);
}

// Order-3 recurrent node: a[i][j][k] = w_hidden[i][j] * w_input[i][k].
// Leg 0 feeds the next step, leg 1 consumes the previous hidden state, leg 2
// consumes the step input.
DenseTensor rac_node(const RacWeights& w, int layer) {
    const auto& wh = w.w_hidden[static_cast<std::size_t>(layer)];
    const auto& wi = w.w_input[static_cast<std::size_t>(layer)];
    DenseTensor node({wh.extent(0), wh.extent(1), wi.extent(1)});
    for (std::int64_t i = 0; i < wh.extent(0); ++i) {
        for (std::int64_t j = 0; j < wh.extent(1); ++j) {
            for (std::int64_t k = 0; k < wi.extent(1); ++k) {
                node.at({i, j, k}) = wh.at({i, j}) * wi.at({i, k});
            }
        }
    }
    return node;
}

// Incremental network assembly shared by the builders. Tracks, per site, the
// raw external positions carrying its label, in registration order.
struct Assembly {
    std::vector<DenseTensor> nodes;
    std::vector<Bond> bonds;
    std::vector<ExternalLeg> externals;
    std::vector<std::vector<int>> site_positions;
    int leg_budget = 0;

    explicit Assembly(int n_sites, int budget)
        : site_positions(static_cast<std::size_t>(n_sites)), leg_budget(budget) {}

    int add_node(DenseTensor t) {
        nodes.push_back(std::move(t));
        return static_cast<int>(nodes.size()) - 1;
    }

    void bond(LegRef a, LegRef b) { bonds.push_back({a, b}); }

    void site_leg(int node, int leg, int site) {
        require(static_cast<int>(externals.size()) < leg_budget, ErrorCode::budget_exceeded,
                "raw external-leg count exceeds budget of " + std::to_string(leg_budget));
        site_positions[static_cast<std::size_t>(site)].push_back(
            static_cast<int>(externals.size()));
        externals.push_back({node, leg, "s" + std::to_string(site + 1)});
    }

    BuiltNetwork finish(std::string provenance) {
        DupGroups groups;
        for (std::size_t j = 0; j < site_positions.size(); ++j) {
            require(!site_positions[j].empty(), ErrorCode::internal,
                    "site " + std::to_string(j + 1) + " never consumed");
            groups.groups.push_back(site_positions[j]);
            groups.labels.push_back("s" + std::to_string(j + 1));
        }
        TensorNetwork tn(std::move(nodes), std::move(bonds), std::move(externals));
        return BuiltNetwork{std::move(tn), std::move(groups), std::move(provenance)};
    }
};

// Layer geometry mirroring the forward evaluation.
struct Stage {
    enum class Kind { conv, pool } kind;
    int conv_index;
    int kernel;
    int stride;
    int in_extent;
    int out_extent;
};

std::vector<Stage> stages(const ConvSpec& spec) {
    std::vector<Stage> out;
    int extent = spec.alpha;
    for (int l = 0; l < spec.layers; ++l) {
        out.push_back({Stage::Kind::conv, l, spec.kernel, spec.stride, extent,
                       ceil_div(extent, spec.stride)});
        extent = out.back().out_extent;
        if (spec.pool == 2 && l + 1 < spec.layers) {
            out.push_back({Stage::Kind::pool, -1, 2, 2, extent, ceil_div(extent, 2)});
            extent = out.back().out_extent;
        }
    }
    return out;
}

std::vector<int> stage_sources(const Stage& st, int out_cell, int dims) {
    const int slots = static_cast<int>(ipow(st.kernel, dims));
    std::vector<int> src(static_cast<std::size_t>(slots), -1);
    const int out_row = dims == 2 ? out_cell / st.out_extent : out_cell;
    const int out_col = dims == 2 ? out_cell % st.out_extent : 0;
    for (int k = 0; k < slots; ++k) {
        const int off_row = dims == 2 ? k / st.kernel : k;
        const int off_col = dims == 2 ? k % st.kernel : 0;
        const int row = out_row * st.stride + off_row;
        const int col = out_col * st.stride + off_col;
        if (row >= st.in_extent || (dims == 2 && col >= st.in_extent)) continue;
        src[static_cast<std::size_t>(k)] = dims == 2 ? row * st.in_extent + col : row;
    }
    return src;
}

std::string conv_provenance(const char* name, const ConvSpec& spec) {
    return std::string(name) + "(dims=" + std::to_string(spec.dims) +
           ",alpha=" + std::to_string(spec.alpha) + ",M=" + std::to_string(spec.site_dim) +
           ",K=" + std::to_string(spec.kernel) + ",S=" + std::to_string(spec.stride) +
           ",P=" + std::to_string(spec.pool) + ",L=" + std::to_string(spec.layers) + ")";
}

std::string rac_provenance(const char* name, const RacSpec& spec) {
    return std::string(name) + "(N=" + std::to_string(spec.seq_len) +
           ",M=" + std::to_string(spec.site_dim) + ",R=" + std::to_string(spec.hidden) +
           ",L=" + std::to_string(spec.layers) + ")";
}

// Caps the network with the output head, joining multiple top cells through a
// global product-pooling delta node first.
void cap_with_head(Assembly& a, const std::vector<LegRef>& tops, const DenseTensor& head) {
    LegRef out;
    if (tops.size() == 1) {
        out = tops.front();
    } else {
        const int q = static_cast<int>(tops.size());
        const int pool = a.add_node(DenseTensor::delta(q + 1, head.extent(0)));
        for (int t = 0; t < q; ++t) a.bond({pool, t}, tops[static_cast<std::size_t>(t)]);
        out = {pool, q};
    }
    const int head_node = a.add_node(head);
    a.bond({head_node, 0}, out);
}

}  // namespace

BuiltNetwork tree_tn_from_cac(const ConvSpec& spec, const ConvWeights& w) {
    spec.validate();
    w.validate(spec);
    require(spec.stride == spec.kernel && spec.pool == 1, ErrorCode::invalid_argument,
            "tree construction requires stride == kernel and no pooling");
    require(spec.alpha % ipow(spec.kernel, spec.layers) == 0, ErrorCode::invalid_argument,
            "tree construction requires the extent to divide by kernel^layers (got alpha=" +
                std::to_string(spec.alpha) + ", kernel=" + std::to_string(spec.kernel) +
                ", layers=" + std::to_string(spec.layers) + ")");

    Assembly a(spec.n_sites(), spec.n_sites() + 1);
    const auto sts = stages(spec);
    // prev[cell] = producer of the level-below vector; empty at the input.
    std::vector<LegRef> prev;
    std::vector<std::pair<int, std::pair<int, int>>> site_legs;  // (site, (node, leg))

    for (const auto& st : sts) {
        const int out_cells = static_cast<int>(ipow(st.out_extent, spec.dims));
        std::vector<LegRef> next(static_cast<std::size_t>(out_cells));
        for (int cell = 0; cell < out_cells; ++cell) {
            const auto sources = stage_sources(st, cell, spec.dims);
            std::vector<int> slots;
            for (std::size_t k = 0; k < sources.size(); ++k) {
                require(sources[k] >= 0, ErrorCode::internal,
                        "tree window clipped despite divisibility");
                slots.push_back(static_cast<int>(k));
            }
            const int node = a.add_node(conv_node(spec, w, st.conv_index, slots, false));
            for (std::size_t t = 0; t < sources.size(); ++t) {
                if (st.conv_index == 0) {
                    site_legs.push_back({sources[t], {node, static_cast<int>(t) + 1}});
                } else {
                    a.bond({node, static_cast<int>(t) + 1},
                           prev[static_cast<std::size_t>(sources[t])]);
                }
            }
            next[static_cast<std::size_t>(cell)] = {node, 0};
        }
        prev = std::move(next);
    }
    // Register the leaf legs in site order so the contraction axes line up
    // with the amplitude tensor.
    std::sort(site_legs.begin(), site_legs.end());
    for (const auto& [site, ref] : site_legs) a.site_leg(ref.first, ref.second, site);

    cap_with_head(a, prev, w.head);
    return a.finish(conv_provenance("tree", spec));
}

BuiltNetwork mps_from_rac(const RacSpec& spec, const RacWeights& w) {
    spec.validate();
    w.validate(spec);
    require(spec.layers == 1, ErrorCode::invalid_argument,
            "matrix-product construction requires a single recurrent layer");

    Assembly a(spec.seq_len, spec.seq_len + 1);
    LegRef prev{a.add_node(w.h0[0]), 0};
    for (int t = 0; t < spec.seq_len; ++t) {
        const int node = a.add_node(rac_node(w, 0));
        a.bond({node, 1}, prev);
        a.site_leg(node, 2, t);
        prev = {node, 0};
    }
    const int out = a.add_node(w.w_out);
    a.bond({out, 0}, prev);
    return a.finish(rac_provenance("mps", spec));
}

namespace {

// Recursive expansion of the overlapping conv dataflow: every consumer
// regenerates the sub-branch producing its input, so shared intermediates
// appear once per use and shared sites once per computational path.
struct RecursiveTreeBuilder {
    const ConvSpec& spec;
    const ConvWeights& w;
    Assembly& a;
    std::vector<Stage> sts;

    LegRef build(int level, int cell) {
        const Stage& st = sts[static_cast<std::size_t>(level)];
        const auto sources = stage_sources(st, cell, spec.dims);
        std::vector<int> slots;
        for (std::size_t k = 0; k < sources.size(); ++k) {
            if (sources[k] >= 0) slots.push_back(static_cast<int>(k));
        }
        const bool clipped = slots.size() < sources.size();
        const int node =
            st.kind == Stage::Kind::conv
                ? a.add_node(conv_node(spec, w, st.conv_index, slots, clipped))
                : a.add_node(pool_node(spec.widths[static_cast<std::size_t>(
                                           prev_conv_index(level)) +
                                       1],
                                       static_cast<int>(slots.size()), clipped,
                                       spec.padding));
        for (std::size_t t = 0; t < slots.size(); ++t) {
            const int src = sources[static_cast<std::size_t>(slots[t])];
            if (level == 0) {
                a.site_leg(node, static_cast<int>(t) + 1, src);
            } else {
                a.bond({node, static_cast<int>(t) + 1}, build(level - 1, src));
            }
        }
        return {node, 0};
    }

    int prev_conv_index(int level) const {
        for (int v = level; v >= 0; --v) {
            if (sts[static_cast<std::size_t>(v)].kind == Stage::Kind::conv) {
                return sts[static_cast<std::size_t>(v)].conv_index;
            }
        }
        fail(ErrorCode::internal, "pooling stage without a preceding conv stage");
    }
};

}  // namespace

BuiltNetwork recursive_tree_from_cac(const ConvSpec& spec, const ConvWeights& w,
                                     int leg_budget) {
    spec.validate();
    w.validate(spec);
    require(spec.stride == 1, ErrorCode::invalid_argument,
            "recursive tree construction applies to unit-stride circuits");

    Assembly a(spec.n_sites(), leg_budget);
    RecursiveTreeBuilder builder{spec, w, a, stages(spec)};
    const Stage& top = builder.sts.back();
    const int top_cells = static_cast<int>(ipow(top.out_extent, spec.dims));
    std::vector<LegRef> tops;
    tops.reserve(static_cast<std::size_t>(top_cells));
    for (int cell = 0; cell < top_cells; ++cell) {
        tops.push_back(builder.build(static_cast<int>(builder.sts.size()) - 1, cell));
    }
    cap_with_head(a, tops, w.head);
    return a.finish(conv_provenance("recursive-tree", spec));
}

namespace {

struct RecursiveMpsBuilder {
    const RacSpec& spec;
    const RacWeights& w;
    Assembly& a;

    // Chain generating the first-layer hidden state after step t (1-based).
    LegRef lower_chain(int t) {
        LegRef prev = t == 1 ? LegRef{a.add_node(w.h0[0]), 0} : lower_chain(t - 1);
        const int node = a.add_node(rac_node(w, 0));
        a.bond({node, 1}, prev);
        a.site_leg(node, 2, t - 1);
        return {node, 0};
    }

    LegRef upper_chain(int t) {
        LegRef prev = t == 1 ? LegRef{a.add_node(w.h0[1]), 0} : upper_chain(t - 1);
        const int node = a.add_node(rac_node(w, 1));
        a.bond({node, 1}, prev);
        a.bond({node, 2}, lower_chain(t));
        return {node, 0};
    }
};

}  // namespace

BuiltNetwork recursive_mps_from_rac(const RacSpec& spec, const RacWeights& w,
                                    int leg_budget) {
    spec.validate();
    w.validate(spec);
    require(spec.layers == 2, ErrorCode::invalid_argument,
            "recursive matrix-product construction requires depth 2");

    Assembly a(spec.seq_len, leg_budget);
    RecursiveMpsBuilder builder{spec, w, a};
    const LegRef top = builder.upper_chain(spec.seq_len);
    const int out = a.add_node(w.w_out);
    a.bond({out, 0}, top);
    return a.finish(rac_provenance("recursive-mps", spec));
}

BuiltNetwork build_equivalent_network(const Circuit& c, int leg_budget) {
    if (const auto* conv = std::get_if<ConvCircuit>(&c)) {
        if (conv->spec.stride == conv->spec.kernel && conv->spec.pool == 1) {
            return tree_tn_from_cac(conv->spec, conv->weights);
        }
        if (conv->spec.stride == 1) {
            return recursive_tree_from_cac(conv->spec, conv->weights, leg_budget);
        }
        fail(ErrorCode::invalid_argument,
             "no exact network construction for stride==kernel with pooling");
    }
    if (const auto* rac = std::get_if<RacCircuit>(&c)) {
        return rac->spec.layers == 1 ? mps_from_rac(rac->spec, rac->weights)
                                     : recursive_mps_from_rac(rac->spec, rac->weights,
                                                              leg_budget);
    }
    fail(ErrorCode::invalid_argument,
         "the fully factorized family has no network construction");
}

}  // namespace tnac
