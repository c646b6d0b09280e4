#include "tnac/tnac.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/analysis.hpp"
#include "core/builders.hpp"
#include "core/circuits.hpp"
#include "core/circuits_io.hpp"
#include "core/network.hpp"
#include "core/network_io.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"
#include "core/tensor_io.hpp"

struct tnac_tensor {
    tnac::DenseTensor value;
};

struct tnac_network {
    tnac::TensorNetwork value;
};

struct tnac_network_builder {
    std::vector<tnac::DenseTensor> nodes;
    std::vector<tnac::Bond> bonds;
    std::vector<tnac::ExternalLeg> externals;
};

struct tnac_circuit {
    tnac::Circuit value;
};

namespace {

thread_local std::string g_last_error;

tnac_status to_status(tnac::ErrorCode code) {
    switch (code) {
        case tnac::ErrorCode::invalid_argument:
            return TNAC_ERR_INVALID_ARGUMENT;
        case tnac::ErrorCode::shape_mismatch:
            return TNAC_ERR_SHAPE_MISMATCH;
        case tnac::ErrorCode::budget_exceeded:
            return TNAC_ERR_BUDGET_EXCEEDED;
        case tnac::ErrorCode::io_error:
            return TNAC_ERR_IO;
        case tnac::ErrorCode::parse_error:
            return TNAC_ERR_PARSE;
        case tnac::ErrorCode::internal:
            return TNAC_ERR_INTERNAL;
    }
    return TNAC_ERR_INTERNAL;
}

template <typename Fn>
tnac_status guarded(Fn&& fn) {
    try {
        fn();
        return TNAC_OK;
    } catch (const tnac::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TNAC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TNAC_ERR_INTERNAL;
    }
}

void check_ptr(const void* p, const char* name) {
    tnac::require(p != nullptr, tnac::ErrorCode::invalid_argument,
                  std::string(name) + " must not be NULL");
}

std::vector<int> collect_sites(const int32_t* a_sites, int32_t a_len) {
    check_ptr(a_sites, "a_sites");
    tnac::require(a_len >= 1, tnac::ErrorCode::invalid_argument,
                  "a_sites must list at least one site");
    return std::vector<int>(a_sites, a_sites + a_len);
}

tnac::Partition partition_for(const tnac::DenseTensor& t, const int32_t* a_sites,
                              int32_t a_len) {
    tnac::require(t.order() >= 2, tnac::ErrorCode::invalid_argument,
                  "partition diagnostics need an order >= 2 tensor");
    const std::int64_t m = t.extent(0);
    return tnac::Partition::from_a_sites(collect_sites(a_sites, a_len), t.order(), m);
}

void copy_string(const std::string& s, char* buf, size_t cap, const char* what) {
    check_ptr(buf, what);
    tnac::require(s.size() + 1 <= cap, tnac::ErrorCode::invalid_argument,
                  std::string(what) + " buffer too small (need " +
                      std::to_string(s.size() + 1) + " bytes)");
    std::memcpy(buf, s.c_str(), s.size() + 1);
}

void fill_c_record(const tnac::ScalingRecord& in, tnac_scaling_record* out) {
    std::memset(out, 0, sizeof(*out));
    copy_string(in.kind, out->kind, sizeof(out->kind), "record kind");
    out->dims = in.dims;
    out->n = in.n;
    out->alpha = in.alpha;
    out->site_dim = in.site_dim;
    out->kernel = in.kernel;
    out->stride = in.stride;
    out->pool = in.pool;
    out->layers = in.layers;
    out->hidden = in.hidden;
    copy_string(in.partition, out->partition, sizeof(out->partition), "record partition");
    out->a_size = in.a_size;
    out->trials = in.trials;
    out->seed = in.seed;
    out->best_ee = in.best_ee;
    out->best_rank = in.best_rank;
    out->bound_value = in.bound_value;
    out->wall_time_s = in.wall_time_s;
    out->skipped = in.skipped ? 1 : 0;
}

tnac::ScalingRecord from_c_record(const tnac_scaling_record& in) {
    tnac::ScalingRecord out;
    out.kind = in.kind;
    out.dims = in.dims;
    out.n = in.n;
    out.alpha = in.alpha;
    out.site_dim = in.site_dim;
    out.kernel = in.kernel;
    out.stride = in.stride;
    out.pool = in.pool;
    out.layers = in.layers;
    out.hidden = in.hidden;
    out.partition = in.partition;
    out.a_size = in.a_size;
    out.trials = in.trials;
    out.seed = in.seed;
    out.best_ee = in.best_ee;
    out.best_rank = in.best_rank;
    out.bound_value = in.bound_value;
    out.wall_time_s = in.wall_time_s;
    out.skipped = in.skipped != 0;
    return out;
}

}  // namespace

extern "C" {

const char* tnac_version(void) { return "0.1.0"; }

const char* tnac_status_name(tnac_status status) {
    switch (status) {
        case TNAC_OK:
            return "ok";
        case TNAC_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case TNAC_ERR_SHAPE_MISMATCH:
            return "shape mismatch";
        case TNAC_ERR_BUDGET_EXCEEDED:
            return "budget exceeded";
        case TNAC_ERR_IO:
            return "io error";
        case TNAC_ERR_PARSE:
            return "parse error";
        case TNAC_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* tnac_last_error(void) { return g_last_error.c_str(); }

uint64_t tnac_derive_seed(uint64_t seed, uint64_t index) {
    return tnac::mix_seed(seed, index);
}

/* ---- tensors ----------------------------------------------------------- */

tnac_status tnac_tensor_create(int32_t order, const int64_t* shape, const double* data,
                               tnac_tensor** out) {
    return guarded([&] {
        check_ptr(out, "out");
        tnac::require(order >= 0, tnac::ErrorCode::invalid_argument,
                      "order must be non-negative");
        if (order > 0) check_ptr(shape, "shape");
        std::vector<std::int64_t> s(shape, shape + order);
        tnac::DenseTensor t{s};
        if (data != nullptr) {
            std::copy(data, data + t.size(), t.data().begin());
        }
        *out = new tnac_tensor{std::move(t)};
    });
}

tnac_status tnac_tensor_delta(int32_t order, int64_t dim, tnac_tensor** out) {
    return guarded([&] {
        check_ptr(out, "out");
        *out = new tnac_tensor{tnac::DenseTensor::delta(order, dim)};
    });
}

void tnac_tensor_free(tnac_tensor* t) { delete t; }

tnac_status tnac_tensor_order(const tnac_tensor* t, int32_t* out) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(out, "out");
        *out = t->value.order();
    });
}

tnac_status tnac_tensor_shape(const tnac_tensor* t, int64_t* buf, int32_t cap) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(buf, "buf");
        tnac::require(cap >= t->value.order(), tnac::ErrorCode::invalid_argument,
                      "shape buffer too small");
        std::copy(t->value.shape().begin(), t->value.shape().end(), buf);
    });
}

tnac_status tnac_tensor_size(const tnac_tensor* t, int64_t* out) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(out, "out");
        *out = t->value.size();
    });
}

tnac_status tnac_tensor_data(const tnac_tensor* t, const double** ptr, int64_t* len) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(ptr, "ptr");
        check_ptr(len, "len");
        *ptr = t->value.data().data();
        *len = t->value.size();
    });
}

tnac_status tnac_tensor_contract(const tnac_tensor* a, const tnac_tensor* b,
                                 const int32_t* pairs, int32_t npairs, tnac_tensor** out) {
    return guarded([&] {
        check_ptr(a, "a");
        check_ptr(b, "b");
        check_ptr(out, "out");
        tnac::require(npairs >= 0, tnac::ErrorCode::invalid_argument,
                      "npairs must be non-negative");
        if (npairs > 0) check_ptr(pairs, "pairs");
        std::vector<tnac::ContractionPair> ps;
        ps.reserve(static_cast<std::size_t>(npairs));
        for (int32_t i = 0; i < npairs; ++i) {
            ps.emplace_back(pairs[2 * i], pairs[2 * i + 1]);
        }
        *out = new tnac_tensor{tnac::contract(a->value, b->value, ps)};
    });
}

tnac_status tnac_tensor_dup(const tnac_tensor* t, const int32_t* group_ids,
                            tnac_tensor** out) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(out, "out");
        if (t->value.order() > 0) check_ptr(group_ids, "group_ids");
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(t->value.order()));
        for (int i = 0; i < t->value.order(); ++i) {
            labels.push_back("g" + std::to_string(group_ids[i]));
        }
        *out = new tnac_tensor{tnac::dup(t->value, tnac::DupGroups::from_labels(labels))};
    });
}

tnac_status tnac_tensor_matricize(const tnac_tensor* t, const int32_t* a_sites,
                                  int32_t a_len, tnac_tensor** out) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(out, "out");
        *out = new tnac_tensor{tnac::matricize(t->value, partition_for(t->value, a_sites, a_len))};
    });
}

tnac_status tnac_entanglement_entropy(const tnac_tensor* t, const int32_t* a_sites,
                                      int32_t a_len, double* out) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(out, "out");
        *out = tnac::entanglement_entropy(t->value, partition_for(t->value, a_sites, a_len));
    });
}

tnac_status tnac_schmidt_rank(const tnac_tensor* t, const int32_t* a_sites, int32_t a_len,
                              double rel_tol, int64_t* out) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(out, "out");
        if (rel_tol == 0.0) rel_tol = tnac::kDefaultRankTol;
        *out = tnac::schmidt_rank(t->value, partition_for(t->value, a_sites, a_len), rel_tol);
    });
}

tnac_status tnac_tensor_max_rel_deviation(const tnac_tensor* a, const tnac_tensor* b,
                                          double* out) {
    return guarded([&] {
        check_ptr(a, "a");
        check_ptr(b, "b");
        check_ptr(out, "out");
        *out = tnac::max_relative_deviation(a->value, b->value);
    });
}

tnac_status tnac_tensor_read(const char* path, tnac_tensor** out) {
    return guarded([&] {
        check_ptr(path, "path");
        check_ptr(out, "out");
        *out = new tnac_tensor{tnac::read_tensor_file(path)};
    });
}

tnac_status tnac_tensor_write(const tnac_tensor* t, const char* path) {
    return guarded([&] {
        check_ptr(t, "tensor");
        check_ptr(path, "path");
        tnac::write_tensor_file(t->value, path);
    });
}

/* ---- tensor networks ---------------------------------------------------- */

tnac_status tnac_network_builder_create(tnac_network_builder** out) {
    return guarded([&] {
        check_ptr(out, "out");
        *out = new tnac_network_builder{};
    });
}

void tnac_network_builder_free(tnac_network_builder* b) { delete b; }

tnac_status tnac_network_builder_add_node(tnac_network_builder* b, const tnac_tensor* t,
                                          int32_t* node_id_out) {
    return guarded([&] {
        check_ptr(b, "builder");
        check_ptr(t, "tensor");
        b->nodes.push_back(t->value);
        if (node_id_out != nullptr) {
            *node_id_out = static_cast<int32_t>(b->nodes.size()) - 1;
        }
    });
}

tnac_status tnac_network_builder_bond(tnac_network_builder* b, int32_t node_a,
                                      int32_t leg_a, int32_t node_b, int32_t leg_b) {
    return guarded([&] {
        check_ptr(b, "builder");
        b->bonds.push_back({{node_a, leg_a}, {node_b, leg_b}});
    });
}

tnac_status tnac_network_builder_external(tnac_network_builder* b, int32_t node,
                                          int32_t leg, const char* label) {
    return guarded([&] {
        check_ptr(b, "builder");
        check_ptr(label, "label");
        b->externals.push_back({node, leg, label});
    });
}

tnac_status tnac_network_builder_finish(tnac_network_builder* b, tnac_network** out) {
    return guarded([&] {
        check_ptr(b, "builder");
        check_ptr(out, "out");
        *out = new tnac_network{tnac::TensorNetwork(b->nodes, b->bonds, b->externals)};
    });
}

void tnac_network_free(tnac_network* n) { delete n; }

tnac_status tnac_network_num_nodes(const tnac_network* n, int32_t* out) {
    return guarded([&] {
        check_ptr(n, "network");
        check_ptr(out, "out");
        *out = n->value.num_nodes();
    });
}

tnac_status tnac_network_num_externals(const tnac_network* n, int32_t* out) {
    return guarded([&] {
        check_ptr(n, "network");
        check_ptr(out, "out");
        *out = static_cast<int32_t>(n->value.externals().size());
    });
}

tnac_status tnac_network_external_label(const tnac_network* n, int32_t position,
                                        char* buf, size_t cap) {
    return guarded([&] {
        check_ptr(n, "network");
        tnac::require(position >= 0 &&
                          position < static_cast<int32_t>(n->value.externals().size()),
                      tnac::ErrorCode::invalid_argument, "external position out of range");
        copy_string(n->value.externals()[static_cast<std::size_t>(position)].label, buf,
                    cap, "label");
    });
}

tnac_status tnac_network_contract(const tnac_network* n, int64_t max_elements,
                                  tnac_tensor** out) {
    return guarded([&] {
        check_ptr(n, "network");
        check_ptr(out, "out");
        if (max_elements == 0) max_elements = tnac::kDefaultContractionBudget;
        *out = new tnac_tensor{tnac::contract_network(n->value, max_elements)};
    });
}

tnac_status tnac_network_dup_contract(const tnac_network* n, int64_t max_elements,
                                      tnac_tensor** out) {
    return guarded([&] {
        check_ptr(n, "network");
        check_ptr(out, "out");
        if (max_elements == 0) max_elements = tnac::kDefaultContractionBudget;
        const tnac::DenseTensor raw = tnac::contract_network(n->value, max_elements);
        *out = new tnac_tensor{tnac::dup(raw, tnac::dup_groups(n->value))};
    });
}

tnac_status tnac_network_attach_deltas(const tnac_network* n, tnac_network** out) {
    return guarded([&] {
        check_ptr(n, "network");
        check_ptr(out, "out");
        *out = new tnac_network{tnac::attach_dup_deltas(n->value)};
    });
}

tnac_status tnac_network_read(const char* path, tnac_network** out) {
    return guarded([&] {
        check_ptr(path, "path");
        check_ptr(out, "out");
        *out = new tnac_network{tnac::read_network_file(path)};
    });
}

tnac_status tnac_network_write(const tnac_network* n, const char* path) {
    return guarded([&] {
        check_ptr(n, "network");
        check_ptr(path, "path");
        tnac::write_network_file(n->value, path);
    });
}

tnac_status tnac_no_cloning(int64_t dim, int32_t* basis_cloned, double* violation,
                            tnac_tensor** clone_of_ones) {
    return guarded([&] {
        check_ptr(basis_cloned, "basis_cloned");
        check_ptr(violation, "violation");
        tnac::CloningWitness witness = tnac::no_cloning_witness(dim);
        *basis_cloned = witness.basis_cloned ? 1 : 0;
        *violation = witness.violation;
        if (clone_of_ones != nullptr) {
            *clone_of_ones = new tnac_tensor{std::move(witness.clone_of_ones)};
        }
    });
}

/* ---- circuits ----------------------------------------------------------- */

tnac_status tnac_circuit_conv_create(int32_t dims, int32_t alpha, int64_t site_dim,
                                     int32_t kernel, int32_t stride, int32_t pool,
                                     int32_t layers, const int64_t* widths,
                                     tnac_padding padding, tnac_circuit** out) {
    return guarded([&] {
        check_ptr(out, "out");
        check_ptr(widths, "widths");
        tnac::ConvSpec spec;
        spec.dims = dims;
        spec.alpha = alpha;
        spec.site_dim = site_dim;
        spec.kernel = kernel;
        spec.stride = stride;
        spec.pool = pool;
        spec.layers = layers;
        tnac::require(layers >= 1, tnac::ErrorCode::invalid_argument,
                      "need at least one conv layer");
        spec.widths.assign(widths, widths + layers + 1);
        spec.padding = padding == TNAC_PAD_STRICT_ZERO ? tnac::PaddingMode::strict_zero
                                                       : tnac::PaddingMode::identity;
        spec.validate();
        tnac::ConvCircuit circuit{spec, tnac::ConvWeights::random(spec, 0)};
        *out = new tnac_circuit{std::move(circuit)};
    });
}

tnac_status tnac_circuit_rac_create(int32_t seq_len, int64_t site_dim, int64_t hidden,
                                    int32_t layers, tnac_circuit** out) {
    return guarded([&] {
        check_ptr(out, "out");
        tnac::RacSpec spec;
        spec.seq_len = seq_len;
        spec.site_dim = site_dim;
        spec.hidden = hidden;
        spec.layers = layers;
        spec.validate();
        tnac::RacCircuit circuit{spec, tnac::RacWeights::random(spec, 0)};
        *out = new tnac_circuit{std::move(circuit)};
    });
}

tnac_status tnac_circuit_product_create(int32_t n, int64_t site_dim, tnac_circuit** out) {
    return guarded([&] {
        check_ptr(out, "out");
        tnac::ProductSpec spec;
        spec.n = n;
        spec.site_dim = site_dim;
        spec.validate();
        tnac::ProductCircuit circuit{spec, tnac::ProductWeights::random(spec, 0)};
        *out = new tnac_circuit{std::move(circuit)};
    });
}

tnac_status tnac_circuit_read(const char* path, tnac_circuit** out) {
    return guarded([&] {
        check_ptr(path, "path");
        check_ptr(out, "out");
        *out = new tnac_circuit{tnac::read_circuit_file(path)};
    });
}

tnac_status tnac_circuit_parse(const char* json_text, const char* base_dir,
                               tnac_circuit** out) {
    return guarded([&] {
        check_ptr(json_text, "json_text");
        check_ptr(out, "out");
        *out = new tnac_circuit{
            tnac::parse_circuit_json(json_text, base_dir != nullptr ? base_dir : ".")};
    });
}

void tnac_circuit_free(tnac_circuit* c) { delete c; }

tnac_status tnac_circuit_kind(const tnac_circuit* c, char* buf, size_t cap) {
    return guarded([&] {
        check_ptr(c, "circuit");
        copy_string(tnac::circuit_kind(c->value), buf, cap, "kind");
    });
}

tnac_status tnac_circuit_num_sites(const tnac_circuit* c, int32_t* out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        *out = tnac::n_sites(c->value);
    });
}

tnac_status tnac_circuit_site_dim(const tnac_circuit* c, int64_t* out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        *out = tnac::site_dim(c->value);
    });
}

tnac_status tnac_circuit_randomize(tnac_circuit* c, uint64_t seed) {
    return guarded([&] {
        check_ptr(c, "circuit");
        tnac::randomize(c->value, seed);
    });
}

tnac_status tnac_circuit_forward(const tnac_circuit* c, const int32_t* config,
                                 double* out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(config, "config");
        check_ptr(out, "out");
        tnac::BasisConfig cfg;
        const int n = tnac::n_sites(c->value);
        cfg.s.assign(config, config + n);
        *out = tnac::forward(c->value, cfg);
    });
}

tnac_status tnac_circuit_materialize(const tnac_circuit* c, int64_t budget,
                                     tnac_tensor** out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        if (budget == 0) budget = tnac::kDefaultMaterializeBudget;
        *out = new tnac_tensor{tnac::materialize(c->value, budget)};
    });
}

tnac_status tnac_circuit_to_network(const tnac_circuit* c, int32_t leg_budget,
                                    tnac_network** out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        if (leg_budget == 0) leg_budget = tnac::kDefaultLegBudget;
        tnac::BuiltNetwork built = tnac::build_equivalent_network(c->value, leg_budget);
        *out = new tnac_network{std::move(built.tn)};
    });
}

tnac_status tnac_conv_param_count(const tnac_circuit* c, int64_t* out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        const auto* conv = std::get_if<tnac::ConvCircuit>(&c->value);
        tnac::require(conv != nullptr, tnac::ErrorCode::invalid_argument,
                      "parameter count applies to conv circuits");
        *out = tnac::param_count(conv->spec);
    });
}

tnac_status tnac_conv_receptive_field(const tnac_circuit* c, int32_t layer, int32_t* out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        const auto* conv = std::get_if<tnac::ConvCircuit>(&c->value);
        tnac::require(conv != nullptr, tnac::ErrorCode::invalid_argument,
                      "receptive fields apply to conv circuits");
        *out = tnac::total_receptive_field(conv->spec, layer);
    });
}

tnac_status tnac_conv_total_stride(const tnac_circuit* c, int32_t layer, int32_t* out) {
    return guarded([&] {
        check_ptr(c, "circuit");
        check_ptr(out, "out");
        const auto* conv = std::get_if<tnac::ConvCircuit>(&c->value);
        tnac::require(conv != nullptr, tnac::ErrorCode::invalid_argument,
                      "total strides apply to conv circuits");
        *out = tnac::total_stride(conv->spec, layer);
    });
}

/* ---- capacity scales ----------------------------------------------------- */

tnac_status tnac_conv_overlap_capacity(double alpha, int32_t dims, double layers,
                                       double kernel, double* out) {
    return guarded([&] {
        check_ptr(out, "out");
        *out = tnac::conv_overlap_capacity(alpha, dims, layers, kernel);
    });
}

tnac_status tnac_conv_pooling_capacity(double alpha, int32_t dims, double kernel,
                                       double* out) {
    return guarded([&] {
        check_ptr(out, "out");
        *out = tnac::conv_pooling_capacity(alpha, dims, kernel);
    });
}

tnac_status tnac_rac_depth_capacity(int64_t a_size, int64_t hidden, int64_t site_dim,
                                    double* out) {
    return guarded([&] {
        check_ptr(out, "out");
        *out = tnac::rac_depth_capacity(a_size, hidden, site_dim);
    });
}

/* ---- scaling experiments -------------------------------------------------- */

tnac_status tnac_max_ee_estimate(const tnac_circuit* family, const int32_t* a_sites,
                                 int32_t a_len, int32_t trials, uint64_t seed,
                                 int64_t budget, tnac_scaling_record* out) {
    return guarded([&] {
        check_ptr(family, "family");
        check_ptr(out, "out");
        if (budget == 0) budget = tnac::kDefaultMaterializeBudget;
        const int n = tnac::n_sites(family->value);
        const tnac::Partition p = tnac::Partition::from_a_sites(
            collect_sites(a_sites, a_len), n, tnac::site_dim(family->value));
        tnac::PartitionRule rule;
        rule.kind = tnac::PartitionRule::Kind::sites;
        for (int s : p.a_sites) rule.sites.push_back(s + 1);
        const tnac::ScalingRecord rec = tnac::max_ee_estimate(
            family->value, p, rule.describe(), trials, seed, budget);
        fill_c_record(rec, out);
    });
}

tnac_status tnac_scaling_run(const tnac_sweep_config* config,
                             tnac_scaling_record** records, int32_t* n_records) {
    return guarded([&] {
        check_ptr(config, "config");
        check_ptr(config->base, "config->base");
        check_ptr(records, "records");
        check_ptr(n_records, "n_records");

        tnac::ExperimentConfig ec;
        ec.base = config->base->value;
        switch (config->axis) {
            case TNAC_AXIS_NONE:
                ec.axis = tnac::ExperimentConfig::Axis::none;
                break;
            case TNAC_AXIS_A_SIZE:
                ec.axis = tnac::ExperimentConfig::Axis::a_size;
                break;
            case TNAC_AXIS_DEPTH:
                ec.axis = tnac::ExperimentConfig::Axis::depth;
                break;
            case TNAC_AXIS_POOL:
                ec.axis = tnac::ExperimentConfig::Axis::pool;
                break;
            default:
                tnac::fail(tnac::ErrorCode::invalid_argument, "unknown sweep axis");
        }
        if (config->n_values > 0) {
            check_ptr(config->values, "config->values");
            ec.values.assign(config->values, config->values + config->n_values);
        }
        switch (config->partition_kind) {
            case TNAC_PART_MIDDLE:
                ec.partition.kind = tnac::PartitionRule::Kind::middle;
                break;
            case TNAC_PART_SUFFIX:
                ec.partition.kind = tnac::PartitionRule::Kind::suffix;
                ec.partition.a_size = config->a_size;
                break;
            case TNAC_PART_PREFIX:
                ec.partition.kind = tnac::PartitionRule::Kind::prefix;
                ec.partition.a_size = config->a_size;
                break;
            case TNAC_PART_SITES:
                ec.partition.kind = tnac::PartitionRule::Kind::sites;
                if (config->n_sites > 0) {
                    check_ptr(config->sites, "config->sites");
                    for (int32_t i = 0; i < config->n_sites; ++i) {
                        ec.partition.sites.push_back(config->sites[i] + 1);
                    }
                }
                break;
            case TNAC_PART_RECT:
                ec.partition.kind = tnac::PartitionRule::Kind::rect;
                ec.partition.rect_row = config->rect_row + 1;
                ec.partition.rect_col = config->rect_col + 1;
                ec.partition.rect_side = config->rect_side;
                break;
            default:
                tnac::fail(tnac::ErrorCode::invalid_argument, "unknown partition kind");
        }
        ec.trials = config->trials;
        ec.seed = config->seed;
        ec.budget = config->budget == 0 ? tnac::kDefaultMaterializeBudget : config->budget;
        ec.rank_tol = config->rank_tol == 0.0 ? tnac::kDefaultRankTol : config->rank_tol;

        const std::vector<tnac::ScalingRecord> rows = tnac::scaling_experiment(ec);
        auto* arr = static_cast<tnac_scaling_record*>(
            std::malloc(sizeof(tnac_scaling_record) * std::max<std::size_t>(rows.size(), 1)));
        tnac::require(arr != nullptr, tnac::ErrorCode::internal, "out of memory");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            fill_c_record(rows[i], &arr[i]);
        }
        *records = arr;
        *n_records = static_cast<int32_t>(rows.size());
    });
}

void tnac_records_free(tnac_scaling_record* records) { std::free(records); }

tnac_status tnac_records_format(const tnac_scaling_record* records, int32_t n_records,
                                tnac_record_format format, int32_t with_timings,
                                int32_t in_bits, char** out) {
    return guarded([&] {
        check_ptr(out, "out");
        tnac::require(n_records >= 0, tnac::ErrorCode::invalid_argument,
                      "n_records must be non-negative");
        if (n_records > 0) check_ptr(records, "records");
        std::vector<tnac::ScalingRecord> rows;
        rows.reserve(static_cast<std::size_t>(n_records));
        for (int32_t i = 0; i < n_records; ++i) {
            rows.push_back(from_c_record(records[i]));
        }
        tnac::RecordFormat fmt;
        fmt.timings = with_timings != 0;
        fmt.bits = in_bits != 0;
        const std::string text = format == TNAC_FORMAT_JSON
                                     ? tnac::records_to_json(rows, fmt)
                                     : tnac::records_to_csv(rows, fmt);
        char* s = static_cast<char*>(std::malloc(text.size() + 1));
        tnac::require(s != nullptr, tnac::ErrorCode::internal, "out of memory");
        std::memcpy(s, text.c_str(), text.size() + 1);
        *out = s;
    });
}

void tnac_string_free(char* s) { std::free(s); }

} /* extern "C" */
