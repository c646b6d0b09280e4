/* tnac — tensor networks for arithmetic circuits.
 *
 * C interface to the tnac core. All functions return a tnac_status; any
 * non-OK status leaves a human-readable message retrievable (per thread)
 * through tnac_last_error(). Objects are opaque handles created and released
 * by the matching *_free call. Unless stated otherwise, out-parameters are
 * written only on TNAC_OK.
 *
 * Conventions: tensors are dense, real (double), row-major. Site indices and
 * axis indices are 0-based. Basis configurations hold values in [0, M).
 */
#ifndef TNAC_H
#define TNAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TNAC_API
#elif defined(TNAC_BUILD_SHARED)
#define TNAC_API __attribute__((visibility("default")))
#else
#define TNAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tnac_status {
    TNAC_OK = 0,
    TNAC_ERR_INVALID_ARGUMENT = 1,
    TNAC_ERR_SHAPE_MISMATCH = 2,
    TNAC_ERR_BUDGET_EXCEEDED = 3,
    TNAC_ERR_IO = 4,
    TNAC_ERR_PARSE = 5,
    TNAC_ERR_INTERNAL = 6,
} tnac_status;

typedef struct tnac_tensor tnac_tensor;
typedef struct tnac_network tnac_network;
typedef struct tnac_network_builder tnac_network_builder;
typedef struct tnac_circuit tnac_circuit;

TNAC_API const char* tnac_version(void);
TNAC_API const char* tnac_status_name(tnac_status status);
/* Message of the last failing call on this thread; empty string if none.
 * The pointer stays valid until the next failing call on the same thread. */
TNAC_API const char* tnac_last_error(void);

/* Deterministic stream derivation (splitmix64 finalizer). Draw k of a run
 * seeded with s uses the stream seeded with tnac_derive_seed(s, k); exposed
 * so external drivers can reproduce per-draw weights. */
TNAC_API uint64_t tnac_derive_seed(uint64_t seed, uint64_t index);

/* ---- tensors ---------------------------------------------------------- */

/* data may be NULL for a zero tensor; otherwise it must hold the row-major
 * product(shape) values. order == 0 creates a scalar. */
TNAC_API tnac_status tnac_tensor_create(int32_t order, const int64_t* shape,
                                        const double* data, tnac_tensor** out);
/* 1 on the super-diagonal, 0 elsewhere. */
TNAC_API tnac_status tnac_tensor_delta(int32_t order, int64_t dim, tnac_tensor** out);
TNAC_API void tnac_tensor_free(tnac_tensor* t);

TNAC_API tnac_status tnac_tensor_order(const tnac_tensor* t, int32_t* out);
TNAC_API tnac_status tnac_tensor_shape(const tnac_tensor* t, int64_t* buf, int32_t cap);
TNAC_API tnac_status tnac_tensor_size(const tnac_tensor* t, int64_t* out);
/* Borrowed view of the flat data; valid while the tensor lives. */
TNAC_API tnac_status tnac_tensor_data(const tnac_tensor* t, const double** ptr,
                                      int64_t* len);

/* Sums over npairs axis pairs; pairs is laid out (a0,b0,a1,b1,...). Free axes
 * of a precede free axes of b in the result. */
TNAC_API tnac_status tnac_tensor_contract(const tnac_tensor* a, const tnac_tensor* b,
                                          const int32_t* pairs, int32_t npairs,
                                          tnac_tensor** out);

/* Collapses duplicated axes: group_ids has one entry per axis of t; axes
 * sharing an id (which must span equal extents) become a single output axis.
 * Output axes are ordered by first appearance of their id. */
TNAC_API tnac_status tnac_tensor_dup(const tnac_tensor* t, const int32_t* group_ids,
                                     tnac_tensor** out);

/* Entanglement diagnostics across the bipartition (a_sites, complement).
 * Requires all extents of t equal. Entropy is in nats. */
TNAC_API tnac_status tnac_tensor_matricize(const tnac_tensor* t, const int32_t* a_sites,
                                           int32_t a_len, tnac_tensor** out);
TNAC_API tnac_status tnac_entanglement_entropy(const tnac_tensor* t,
                                               const int32_t* a_sites, int32_t a_len,
                                               double* out);
TNAC_API tnac_status tnac_schmidt_rank(const tnac_tensor* t, const int32_t* a_sites,
                                       int32_t a_len, double rel_tol, int64_t* out);

/* max |a_i - b_i| over entries, scaled by the largest magnitude entry of
 * either tensor (0 when both are identically zero). */
TNAC_API tnac_status tnac_tensor_max_rel_deviation(const tnac_tensor* a,
                                                   const tnac_tensor* b, double* out);

/* Text format documented in the README ("tnac-tensor v1"). */
TNAC_API tnac_status tnac_tensor_read(const char* path, tnac_tensor** out);
TNAC_API tnac_status tnac_tensor_write(const tnac_tensor* t, const char* path);

/* ---- tensor networks --------------------------------------------------- */

/* Builder-style construction; finish() validates the usual invariants (every
 * leg in exactly one bond or external entry, equal bonded extents, connected
 * bond graph) and yields an immutable network. */
TNAC_API tnac_status tnac_network_builder_create(tnac_network_builder** out);
TNAC_API void tnac_network_builder_free(tnac_network_builder* b);
TNAC_API tnac_status tnac_network_builder_add_node(tnac_network_builder* b,
                                                   const tnac_tensor* t,
                                                   int32_t* node_id_out);
TNAC_API tnac_status tnac_network_builder_bond(tnac_network_builder* b, int32_t node_a,
                                               int32_t leg_a, int32_t node_b,
                                               int32_t leg_b);
/* Labels may repeat; repeated labels mark duplicated external indices. */
TNAC_API tnac_status tnac_network_builder_external(tnac_network_builder* b, int32_t node,
                                                   int32_t leg, const char* label);
TNAC_API tnac_status tnac_network_builder_finish(tnac_network_builder* b,
                                                 tnac_network** out);

TNAC_API void tnac_network_free(tnac_network* n);
TNAC_API tnac_status tnac_network_num_nodes(const tnac_network* n, int32_t* out);
TNAC_API tnac_status tnac_network_num_externals(const tnac_network* n, int32_t* out);
TNAC_API tnac_status tnac_network_external_label(const tnac_network* n, int32_t position,
                                                 char* buf, size_t cap);

/* Full contraction; one result axis per raw external leg, in declaration
 * order. max_elements caps any intermediate tensor (pass 0 for the default). */
TNAC_API tnac_status tnac_network_contract(const tnac_network* n, int64_t max_elements,
                                           tnac_tensor** out);
/* Contraction followed by collapsing equal-labeled axes: the amplitude tensor
 * of a network with duplicated external indices. */
TNAC_API tnac_status tnac_network_dup_contract(const tnac_network* n,
                                               int64_t max_elements, tnac_tensor** out);
/* Rewrites duplicated labels through delta tensors, one per unique label; the
 * result has all-distinct external labels. */
TNAC_API tnac_status tnac_network_attach_deltas(const tnac_network* n,
                                                tnac_network** out);

/* Text format documented in the README ("tnac-network v1"). */
TNAC_API tnac_status tnac_network_read(const char* path, tnac_network** out);
TNAC_API tnac_status tnac_network_write(const tnac_network* n, const char* path);

/* Probes the forced order-3 cloning candidate (the delta tensor) in dimension
 * dim: basis_cloned reports whether it clones every standard-basis vector
 * (it does); violation is the max entrywise deviation of its action on the
 * all-ones vector from the true outer square, witnessing that no tensor
 * network clones arbitrary vectors. clone_of_ones may be NULL. */
TNAC_API tnac_status tnac_no_cloning(int64_t dim, int32_t* basis_cloned,
                                     double* violation, tnac_tensor** clone_of_ones);

/* ---- circuits ---------------------------------------------------------- */

typedef enum tnac_padding {
    TNAC_PAD_IDENTITY = 0,   /* out-of-bounds window slots are skipped */
    TNAC_PAD_STRICT_ZERO = 1 /* out-of-bounds slots contribute zero vectors */
} tnac_padding;

/* widths lists r_0..r_L (layers+1 entries, widths[0] == site_dim). Weights
 * start unset; call tnac_circuit_randomize or load from a file. */
TNAC_API tnac_status tnac_circuit_conv_create(int32_t dims, int32_t alpha,
                                              int64_t site_dim, int32_t kernel,
                                              int32_t stride, int32_t pool,
                                              int32_t layers, const int64_t* widths,
                                              tnac_padding padding, tnac_circuit** out);
TNAC_API tnac_status tnac_circuit_rac_create(int32_t seq_len, int64_t site_dim,
                                             int64_t hidden, int32_t layers,
                                             tnac_circuit** out);
TNAC_API tnac_status tnac_circuit_product_create(int32_t n, int64_t site_dim,
                                                 tnac_circuit** out);
/* JSON circuit description; format documented in the README. */
TNAC_API tnac_status tnac_circuit_read(const char* path, tnac_circuit** out);
/* Same format from an in-memory string; relative weight paths resolve
 * against base_dir (NULL for the working directory). */
TNAC_API tnac_status tnac_circuit_parse(const char* json_text, const char* base_dir,
                                        tnac_circuit** out);
TNAC_API void tnac_circuit_free(tnac_circuit* c);

TNAC_API tnac_status tnac_circuit_kind(const tnac_circuit* c, char* buf, size_t cap);
TNAC_API tnac_status tnac_circuit_num_sites(const tnac_circuit* c, int32_t* out);
TNAC_API tnac_status tnac_circuit_site_dim(const tnac_circuit* c, int64_t* out);

/* Draws i.i.d. standard-normal weights from a pinned generator; the same seed
 * always yields the same weights. */
TNAC_API tnac_status tnac_circuit_randomize(tnac_circuit* c, uint64_t seed);

/* Amplitude for one basis configuration (n_sites values in [0, site_dim)). */
TNAC_API tnac_status tnac_circuit_forward(const tnac_circuit* c, const int32_t* config,
                                          double* out);
/* Order-n tensor of all amplitudes; rejects site_dim^n > budget (0 = default
 * budget of 2^20 entries). */
TNAC_API tnac_status tnac_circuit_materialize(const tnac_circuit* c, int64_t budget,
                                              tnac_tensor** out);
/* Exact tensor-network equivalent; leg_budget caps the raw external legs of
 * the recursive constructions (0 = default of 64). */
TNAC_API tnac_status tnac_circuit_to_network(const tnac_circuit* c, int32_t leg_budget,
                                             tnac_network** out);

/* Conv-circuit quantities. layer is 1-based. */
TNAC_API tnac_status tnac_conv_param_count(const tnac_circuit* c, int64_t* out);
TNAC_API tnac_status tnac_conv_receptive_field(const tnac_circuit* c, int32_t layer,
                                               int32_t* out);
TNAC_API tnac_status tnac_conv_total_stride(const tnac_circuit* c, int32_t layer,
                                            int32_t* out);

/* ---- entanglement capacity scales -------------------------------------- */

TNAC_API tnac_status tnac_conv_overlap_capacity(double alpha, int32_t dims, double layers,
                                                double kernel, double* out);
TNAC_API tnac_status tnac_conv_pooling_capacity(double alpha, int32_t dims, double kernel,
                                                double* out);
TNAC_API tnac_status tnac_rac_depth_capacity(int64_t a_size, int64_t hidden,
                                             int64_t site_dim, double* out);

/* ---- randomized scaling experiments ------------------------------------ */

typedef struct tnac_scaling_record {
    char kind[12];      /* "conv" | "rac" | "product" */
    int32_t dims;
    int32_t n;
    int32_t alpha;      /* conv only, else 0 */
    int64_t site_dim;
    int32_t kernel;     /* conv only */
    int32_t stride;     /* conv only */
    int32_t pool;       /* conv only */
    int32_t layers;     /* conv/rac */
    int64_t hidden;     /* rac only */
    char partition[64]; /* e.g. "suffix:4" */
    int32_t a_size;
    int32_t trials;
    uint64_t seed;
    double best_ee;     /* nats; max over draws */
    int64_t best_rank;  /* max over draws */
    double bound_value; /* family reference scale, see README */
    double wall_time_s;
    int32_t skipped;    /* 1 when the instance exceeded the budget */
} tnac_scaling_record;

/* Randomized lower-bound estimate of the maximal entanglement across the
 * partition (a_sites, complement) over `trials` seeded weight draws. */
TNAC_API tnac_status tnac_max_ee_estimate(const tnac_circuit* family,
                                          const int32_t* a_sites, int32_t a_len,
                                          int32_t trials, uint64_t seed, int64_t budget,
                                          tnac_scaling_record* out);

typedef enum tnac_sweep_axis {
    TNAC_AXIS_NONE = 0,
    TNAC_AXIS_A_SIZE = 1, /* partition suffix/prefix size */
    TNAC_AXIS_DEPTH = 2,  /* conv layer count */
    TNAC_AXIS_POOL = 3,   /* conv pooling, values in {1,2} */
} tnac_sweep_axis;

typedef enum tnac_partition_kind {
    TNAC_PART_MIDDLE = 0,
    TNAC_PART_SUFFIX = 1,
    TNAC_PART_PREFIX = 2,
    TNAC_PART_SITES = 3, /* explicit 0-based sites */
    TNAC_PART_RECT = 4,  /* 2D square block */
} tnac_partition_kind;

typedef struct tnac_sweep_config {
    const tnac_circuit* base;
    tnac_sweep_axis axis;
    const int64_t* values;
    int32_t n_values;
    tnac_partition_kind partition_kind;
    int32_t a_size;        /* suffix/prefix */
    const int32_t* sites;  /* TNAC_PART_SITES */
    int32_t n_sites;
    int32_t rect_row, rect_col, rect_side; /* TNAC_PART_RECT */
    int32_t trials;
    uint64_t seed;
    int64_t budget;  /* 0 = default */
    double rank_tol; /* 0 = default 1e-9 */
} tnac_sweep_config;

/* Runs the sweep; *records receives a malloc'd array of *n_records entries
 * (free with tnac_records_free). Over-budget rows are marked skipped. */
TNAC_API tnac_status tnac_scaling_run(const tnac_sweep_config* config,
                                      tnac_scaling_record** records,
                                      int32_t* n_records);
TNAC_API void tnac_records_free(tnac_scaling_record* records);

typedef enum tnac_record_format {
    TNAC_FORMAT_CSV = 0,
    TNAC_FORMAT_JSON = 1,
} tnac_record_format;

/* Renders records with the fixed column order documented in the README.
 * with_timings includes wall_time_s (not byte-reproducible); in_bits converts
 * best_ee from nats to bits. Free the string with tnac_string_free. */
TNAC_API tnac_status tnac_records_format(const tnac_scaling_record* records,
                                         int32_t n_records, tnac_record_format format,
                                         int32_t with_timings, int32_t in_bits,
                                         char** out);
TNAC_API void tnac_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TNAC_H */
