#include <tnac/tnac.h>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tnac_capi_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

tnac_tensor* make_tensor(const std::vector<int64_t>& shape,
                         const std::vector<double>& data) {
    tnac_tensor* t = nullptr;
    REQUIRE(tnac_tensor_create(static_cast<int32_t>(shape.size()), shape.data(),
                               data.empty() ? nullptr : data.data(), &t) == TNAC_OK);
    return t;
}

}  // namespace

TEST_CASE("version and status strings") {
    CHECK(std::string(tnac_version()) == "0.1.0");
    CHECK(std::string(tnac_status_name(TNAC_OK)) == "ok");
    CHECK(std::string(tnac_status_name(TNAC_ERR_SHAPE_MISMATCH)) == "shape mismatch");
}

TEST_CASE("seed derivation is deterministic and spreads") {
    CHECK(tnac_derive_seed(1, 0) == tnac_derive_seed(1, 0));
    CHECK(tnac_derive_seed(1, 0) != tnac_derive_seed(1, 1));
    CHECK(tnac_derive_seed(1, 0) != tnac_derive_seed(2, 0));
}

TEST_CASE("tensor lifecycle through the C surface") {
    tnac_tensor* t = make_tensor({2, 3}, {1, 2, 3, 4, 5, 6});
    int32_t order = 0;
    CHECK(tnac_tensor_order(t, &order) == TNAC_OK);
    CHECK(order == 2);
    int64_t shape[2] = {0, 0};
    CHECK(tnac_tensor_shape(t, shape, 2) == TNAC_OK);
    CHECK(shape[0] == 2);
    CHECK(shape[1] == 3);
    int64_t size = 0;
    CHECK(tnac_tensor_size(t, &size) == TNAC_OK);
    CHECK(size == 6);
    const double* data = nullptr;
    int64_t len = 0;
    CHECK(tnac_tensor_data(t, &data, &len) == TNAC_OK);
    CHECK(len == 6);
    CHECK(data[4] == 5.0);
    tnac_tensor_free(t);
}

TEST_CASE("errors surface as status codes with messages") {
    tnac_tensor* t = nullptr;
    const int64_t bad_shape[1] = {0};
    CHECK(tnac_tensor_create(1, bad_shape, nullptr, &t) == TNAC_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(tnac_last_error()) > 0);

    tnac_tensor* a = make_tensor({2}, {1, 2});
    tnac_tensor* b = make_tensor({3}, {1, 2, 3});
    const int32_t pairs[2] = {0, 0};
    CHECK(tnac_tensor_contract(a, b, pairs, 1, &t) == TNAC_ERR_SHAPE_MISMATCH);
    CHECK(tnac_tensor_contract(nullptr, b, pairs, 1, &t) == TNAC_ERR_INVALID_ARGUMENT);
    tnac_tensor_free(a);
    tnac_tensor_free(b);
}

TEST_CASE("contraction, dup, and entanglement diagnostics") {
    // Maximally correlated two-site tensor.
    tnac_tensor* bell = make_tensor({2, 2}, {1, 0, 0, 1});

    const int32_t a_sites[1] = {0};
    double ee = 0.0;
    CHECK(tnac_entanglement_entropy(bell, a_sites, 1, &ee) == TNAC_OK);
    CHECK(ee == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    int64_t rank = 0;
    CHECK(tnac_schmidt_rank(bell, a_sites, 1, 0.0, &rank) == TNAC_OK);
    CHECK(rank == 2);

    tnac_tensor* mat = nullptr;
    CHECK(tnac_tensor_matricize(bell, a_sites, 1, &mat) == TNAC_OK);
    int32_t order = 0;
    tnac_tensor_order(mat, &order);
    CHECK(order == 2);
    tnac_tensor_free(mat);

    const int32_t groups[2] = {5, 5};
    tnac_tensor* diag = nullptr;
    CHECK(tnac_tensor_dup(bell, groups, &diag) == TNAC_OK);
    const double* data = nullptr;
    int64_t len = 0;
    tnac_tensor_data(diag, &data, &len);
    CHECK(len == 2);
    CHECK(data[0] == 1.0);
    CHECK(data[1] == 1.0);
    tnac_tensor_free(diag);

    tnac_tensor* eye = nullptr;
    CHECK(tnac_tensor_delta(2, 2, &eye) == TNAC_OK);
    double dev = 0.0;
    CHECK(tnac_tensor_max_rel_deviation(bell, eye, &dev) == TNAC_OK);
    CHECK(dev == 0.0);
    tnac_tensor_free(eye);
    tnac_tensor_free(bell);
}

TEST_CASE("tensor files round-trip through the C surface") {
    TempDir dir;
    tnac_tensor* t = make_tensor({2, 2}, {0.1, -2.5, 3e-5, 7});
    const std::string path = dir.file("t.tensor");
    CHECK(tnac_tensor_write(t, path.c_str()) == TNAC_OK);
    tnac_tensor* back = nullptr;
    CHECK(tnac_tensor_read(path.c_str(), &back) == TNAC_OK);
    double dev = 1.0;
    CHECK(tnac_tensor_max_rel_deviation(t, back, &dev) == TNAC_OK);
    CHECK(dev == 0.0);
    tnac_tensor_free(t);
    tnac_tensor_free(back);
    CHECK(tnac_tensor_read(dir.file("missing.tensor").c_str(), &back) == TNAC_ERR_IO);
}

TEST_CASE("networks assemble, validate, and contract") {
    tnac_tensor* v = make_tensor({3}, {1, 2, 3});
    tnac_tensor* w = make_tensor({3}, {1, 1, 1});

    tnac_network_builder* b = nullptr;
    REQUIRE(tnac_network_builder_create(&b) == TNAC_OK);
    int32_t n0 = -1, n1 = -1;
    CHECK(tnac_network_builder_add_node(b, v, &n0) == TNAC_OK);
    CHECK(tnac_network_builder_add_node(b, w, &n1) == TNAC_OK);
    CHECK(tnac_network_builder_bond(b, n0, 0, n1, 0) == TNAC_OK);
    tnac_network* net = nullptr;
    REQUIRE(tnac_network_builder_finish(b, &net) == TNAC_OK);
    tnac_network_builder_free(b);

    tnac_tensor* out = nullptr;
    CHECK(tnac_network_contract(net, 0, &out) == TNAC_OK);
    const double* data = nullptr;
    int64_t len = 0;
    tnac_tensor_data(out, &data, &len);
    CHECK(len == 1);
    CHECK(data[0] == doctest::Approx(6.0));
    tnac_tensor_free(out);
    tnac_network_free(net);

    // An invalid assembly fails at finish.
    tnac_network_builder* bad = nullptr;
    REQUIRE(tnac_network_builder_create(&bad) == TNAC_OK);
    CHECK(tnac_network_builder_add_node(bad, v, nullptr) == TNAC_OK);
    CHECK(tnac_network_builder_finish(bad, &net) == TNAC_ERR_INVALID_ARGUMENT);
    tnac_network_builder_free(bad);

    tnac_tensor_free(v);
    tnac_tensor_free(w);
}

TEST_CASE("duplicated labels contract through deltas or dup") {
    tnac_tensor* eye = nullptr;
    REQUIRE(tnac_tensor_delta(2, 2, &eye) == TNAC_OK);
    tnac_network_builder* b = nullptr;
    REQUIRE(tnac_network_builder_create(&b) == TNAC_OK);
    int32_t node = -1;
    CHECK(tnac_network_builder_add_node(b, eye, &node) == TNAC_OK);
    CHECK(tnac_network_builder_external(b, node, 0, "s1") == TNAC_OK);
    CHECK(tnac_network_builder_external(b, node, 1, "s1") == TNAC_OK);
    tnac_network* net = nullptr;
    REQUIRE(tnac_network_builder_finish(b, &net) == TNAC_OK);
    tnac_network_builder_free(b);

    int32_t externals = 0;
    CHECK(tnac_network_num_externals(net, &externals) == TNAC_OK);
    CHECK(externals == 2);
    char label[8];
    CHECK(tnac_network_external_label(net, 1, label, sizeof(label)) == TNAC_OK);
    CHECK(std::string(label) == "s1");

    tnac_tensor* collapsed = nullptr;
    CHECK(tnac_network_dup_contract(net, 0, &collapsed) == TNAC_OK);
    const double* data = nullptr;
    int64_t len = 0;
    tnac_tensor_data(collapsed, &data, &len);
    CHECK(len == 2);
    CHECK(data[0] == 1.0);
    CHECK(data[1] == 1.0);
    tnac_tensor_free(collapsed);

    tnac_network* expanded = nullptr;
    CHECK(tnac_network_attach_deltas(net, &expanded) == TNAC_OK);
    int32_t nodes = 0;
    CHECK(tnac_network_num_nodes(expanded, &nodes) == TNAC_OK);
    CHECK(nodes == 2);
    tnac_network_free(expanded);
    tnac_network_free(net);
    tnac_tensor_free(eye);
}

TEST_CASE("no-cloning probe through the C surface") {
    int32_t cloned = 0;
    double violation = 0.0;
    tnac_tensor* ones_image = nullptr;
    CHECK(tnac_no_cloning(3, &cloned, &violation, &ones_image) == TNAC_OK);
    CHECK(cloned == 1);
    CHECK(violation == 1.0);
    int64_t size = 0;
    tnac_tensor_size(ones_image, &size);
    CHECK(size == 9);
    tnac_tensor_free(ones_image);
    CHECK(tnac_no_cloning(0, &cloned, &violation, nullptr) ==
          TNAC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("circuits evaluate, materialize, and convert to networks") {
    const int64_t widths[3] = {2, 2, 2};
    tnac_circuit* conv = nullptr;
    REQUIRE(tnac_circuit_conv_create(1, 4, 2, 2, 2, 1, 2, widths, TNAC_PAD_IDENTITY,
                                     &conv) == TNAC_OK);
    CHECK(tnac_circuit_randomize(conv, 7) == TNAC_OK);

    char kind[8];
    CHECK(tnac_circuit_kind(conv, kind, sizeof(kind)) == TNAC_OK);
    CHECK(std::string(kind) == "conv");
    int32_t n = 0;
    CHECK(tnac_circuit_num_sites(conv, &n) == TNAC_OK);
    CHECK(n == 4);
    int64_t m = 0;
    CHECK(tnac_circuit_site_dim(conv, &m) == TNAC_OK);
    CHECK(m == 2);

    // Two layers of two 2x2 window matrices each, plus the width-2 head.
    int64_t params = 0;
    CHECK(tnac_conv_param_count(conv, &params) == TNAC_OK);
    CHECK(params == 2 * (2 * 2 * 2) + 2);
    int32_t field = 0;
    CHECK(tnac_conv_receptive_field(conv, 1, &field) == TNAC_OK);
    CHECK(field == 2);
    int32_t stride = 0;
    CHECK(tnac_conv_total_stride(conv, 2, &stride) == TNAC_OK);
    CHECK(stride == 4);

    tnac_tensor* amplitudes = nullptr;
    REQUIRE(tnac_circuit_materialize(conv, 0, &amplitudes) == TNAC_OK);
    tnac_network* net = nullptr;
    REQUIRE(tnac_circuit_to_network(conv, 0, &net) == TNAC_OK);
    tnac_tensor* from_net = nullptr;
    REQUIRE(tnac_network_dup_contract(net, 0, &from_net) == TNAC_OK);
    double dev = 1.0;
    CHECK(tnac_tensor_max_rel_deviation(amplitudes, from_net, &dev) == TNAC_OK);
    CHECK(dev < 1e-10);

    // Forward agrees with the materialized entry.
    const int32_t config[4] = {1, 0, 1, 1};
    double y = 0.0;
    CHECK(tnac_circuit_forward(conv, config, &y) == TNAC_OK);
    const double* data = nullptr;
    int64_t len = 0;
    tnac_tensor_data(amplitudes, &data, &len);
    CHECK(y == doctest::Approx(data[0b1011]).epsilon(1e-12));

    tnac_tensor_free(from_net);
    tnac_network_free(net);
    tnac_tensor_free(amplitudes);
    tnac_circuit_free(conv);
}

TEST_CASE("circuit descriptions parse from JSON text") {
    const char* text = R"({"kind": "rac", "seq_len": 3, "site_dim": 2, "hidden": 2,
                           "layers": 2, "weights": {"seed": 11}})";
    tnac_circuit* rac = nullptr;
    REQUIRE(tnac_circuit_parse(text, nullptr, &rac) == TNAC_OK);
    int32_t n = 0;
    tnac_circuit_num_sites(rac, &n);
    CHECK(n == 3);
    int64_t params = 0;
    CHECK(tnac_conv_param_count(rac, &params) == TNAC_ERR_INVALID_ARGUMENT);
    tnac_circuit_free(rac);
    CHECK(tnac_circuit_parse("{]", nullptr, &rac) == TNAC_ERR_PARSE);
}

TEST_CASE("capacity scales") {
    double v = 0.0;
    CHECK(tnac_conv_overlap_capacity(100, 2, 20, 5, &v) == TNAC_OK);
    CHECK(v == 10000.0);
    CHECK(tnac_conv_pooling_capacity(8, 2, 2, &v) == TNAC_OK);
    CHECK(v == 16.0);
    CHECK(tnac_rac_depth_capacity(4, 2, 2, &v) == TNAC_OK);
    CHECK(v == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(tnac_rac_depth_capacity(4, 1, 5, &v) == TNAC_OK);
    CHECK(v == 0.0);
}

TEST_CASE("randomized estimates and sweeps through the C surface") {
    tnac_circuit* rac = nullptr;
    REQUIRE(tnac_circuit_rac_create(6, 2, 2, 2, &rac) == TNAC_OK);

    const int32_t a_sites[3] = {3, 4, 5};
    tnac_scaling_record rec{};
    REQUIRE(tnac_max_ee_estimate(rac, a_sites, 3, 10, 42, 0, &rec) == TNAC_OK);
    CHECK(std::string(rec.kind) == "rac");
    CHECK(rec.n == 6);
    CHECK(rec.a_size == 3);
    CHECK(rec.trials == 10);
    CHECK(rec.best_rank >= 1);
    CHECK(rec.best_ee >= 0.0);
    CHECK(rec.skipped == 0);

    tnac_scaling_record rec2{};
    REQUIRE(tnac_max_ee_estimate(rac, a_sites, 3, 10, 42, 0, &rec2) == TNAC_OK);
    CHECK(rec.best_ee == rec2.best_ee);

    tnac_sweep_config sweep{};
    sweep.base = rac;
    sweep.axis = TNAC_AXIS_A_SIZE;
    const int64_t values[3] = {1, 2, 3};
    sweep.values = values;
    sweep.n_values = 3;
    sweep.partition_kind = TNAC_PART_SUFFIX;
    sweep.trials = 5;
    sweep.seed = 9;
    tnac_scaling_record* rows = nullptr;
    int32_t n_rows = 0;
    REQUIRE(tnac_scaling_run(&sweep, &rows, &n_rows) == TNAC_OK);
    REQUIRE(n_rows == 3);
    CHECK(rows[0].a_size == 1);
    CHECK(rows[2].a_size == 3);

    char* csv = nullptr;
    REQUIRE(tnac_records_format(rows, n_rows, TNAC_FORMAT_CSV, 0, 0, &csv) == TNAC_OK);
    CHECK(std::string(csv).find("index,kind,dims,n,alpha") == 0);
    char* csv_bits = nullptr;
    REQUIRE(tnac_records_format(rows, n_rows, TNAC_FORMAT_CSV, 0, 1, &csv_bits) == TNAC_OK);
    CHECK(std::string(csv) != std::string(csv_bits));
    char* json = nullptr;
    REQUIRE(tnac_records_format(rows, n_rows, TNAC_FORMAT_JSON, 0, 0, &json) == TNAC_OK);
    CHECK(std::string(json).find("\"partition\"") != std::string::npos);
    tnac_string_free(csv);
    tnac_string_free(csv_bits);
    tnac_string_free(json);
    tnac_records_free(rows);
    tnac_circuit_free(rac);
}

TEST_CASE("network files round-trip through the C surface") {
    TempDir dir;
    tnac_circuit* rac = nullptr;
    REQUIRE(tnac_circuit_rac_create(3, 2, 2, 1, &rac) == TNAC_OK);
    CHECK(tnac_circuit_randomize(rac, 3) == TNAC_OK);
    tnac_network* net = nullptr;
    REQUIRE(tnac_circuit_to_network(rac, 0, &net) == TNAC_OK);
    const std::string path = dir.file("mps.tnn");
    CHECK(tnac_network_write(net, path.c_str()) == TNAC_OK);
    tnac_network* back = nullptr;
    REQUIRE(tnac_network_read(path.c_str(), &back) == TNAC_OK);

    tnac_tensor *a = nullptr, *b = nullptr;
    REQUIRE(tnac_network_dup_contract(net, 0, &a) == TNAC_OK);
    REQUIRE(tnac_network_dup_contract(back, 0, &b) == TNAC_OK);
    double dev = 1.0;
    CHECK(tnac_tensor_max_rel_deviation(a, b, &dev) == TNAC_OK);
    CHECK(dev == 0.0);

    tnac_tensor_free(a);
    tnac_tensor_free(b);
    tnac_network_free(net);
    tnac_network_free(back);
    tnac_circuit_free(rac);
}
