#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "core/builders.hpp"
#include "core/circuits_io.hpp"
#include "core/network_io.hpp"
#include "core/tensor_io.hpp"
#include "test_helpers.hpp"

using namespace tnac;
using namespace tnac::testing;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tnac_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    os << text;
}

}  // namespace

TEST_CASE("tensor files round-trip exactly") {
    std::mt19937_64 rng(61);
    DenseTensor t = random_tensor({3, 2, 4}, rng);
    t[0] = 1e-300;
    t[1] = -4.9406564584124654e-324;  // denormal min
    t[2] = 1.7976931348623157e308;
    t[3] = 0.1;                       // classic non-representable decimal

    std::ostringstream os;
    write_tensor(os, t);
    std::istringstream is(os.str());
    DenseTensor back = read_tensor(is);
    REQUIRE(back.shape() == t.shape());
    for (std::int64_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);

    // Writing twice yields identical bytes.
    std::ostringstream os2;
    write_tensor(os2, t);
    CHECK(os.str() == os2.str());
}

TEST_CASE("scalar tensors serialize with an empty shape line") {
    DenseTensor s = DenseTensor::scalar(-2.5);
    std::ostringstream os;
    write_tensor(os, s);
    CHECK(os.str() == "tnac-tensor v1\norder 0\nshape\ndata\n-2.5\n");
    std::istringstream is(os.str());
    CHECK(read_tensor(is)[0] == -2.5);
}

TEST_CASE("tensor file errors are reported") {
    TempDir dir;
    CHECK_THROWS_AS(read_tensor_file(dir.file("missing.tensor")), Error);
    write_file(dir.file("bad.tensor"), "tnac-tensor v2\norder 0\n");
    CHECK_THROWS_AS(read_tensor_file(dir.file("bad.tensor")), Error);
    write_file(dir.file("trunc.tensor"), "tnac-tensor v1\norder 1\nshape 3\ndata\n1\n2\n");
    CHECK_THROWS_WITH_AS(read_tensor_file(dir.file("trunc.tensor")),
                         doctest::Contains("truncated"), Error);
}

TEST_CASE("network files round-trip and recontract identically") {
    const RacSpec spec{3, 2, 2, 2};
    const RacWeights w = RacWeights::random(spec, 63);
    const BuiltNetwork built = recursive_mps_from_rac(spec, w);

    TempDir dir;
    write_network_file(built.tn, dir.file("net.tnn"));
    const TensorNetwork back = read_network_file(dir.file("net.tnn"));
    CHECK(back.num_nodes() == built.tn.num_nodes());
    REQUIRE(back.externals().size() == built.tn.externals().size());
    for (std::size_t i = 0; i < back.externals().size(); ++i) {
        CHECK(back.externals()[i].label == built.tn.externals()[i].label);
    }
    const DenseTensor a = dup(contract_network(built.tn), dup_groups(built.tn));
    const DenseTensor b = dup(contract_network(back), dup_groups(back));
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("network files support node tensors by file reference") {
    TempDir dir;
    std::mt19937_64 rng(67);
    DenseTensor v = random_tensor({3}, rng);
    write_tensor_file(v, dir.file("v.tensor"));
    write_file(dir.file("net.tnn"),
               "tnac-network v1\n"
               "nodes 2\n"
               "node 0 file v.tensor\n"
               "node 1 inline\n"
               "tnac-tensor v1\n"
               "order 1\n"
               "shape 3\n"
               "data\n1\n1\n1\n"
               "bonds 1\n"
               "bond 0 0 1 0\n"
               "externals 0\n");
    const TensorNetwork tn = read_network_file(dir.file("net.tnn"));
    const DenseTensor out = contract_network(tn);
    CHECK(out[0] == doctest::Approx(v[0] + v[1] + v[2]).epsilon(1e-14));
}

TEST_CASE("network parse errors carry context") {
    TempDir dir;
    write_file(dir.file("bad.tnn"), "tnac-network v1\nnodes 1\nnode 7 inline\n");
    CHECK_THROWS_WITH_AS(read_network_file(dir.file("bad.tnn")),
                         doctest::Contains("sequential"), Error);
}

TEST_CASE("circuit descriptions parse from JSON with seeded weights") {
    const std::string text = R"({
        "kind": "conv", "dims": 1, "alpha": 4, "site_dim": 2,
        "kernel": 2, "stride": 2, "layers": 2, "widths": [2, 2, 2],
        "weights": {"seed": 7}
    })";
    const Circuit c = parse_circuit_json(text, ".");
    CHECK(circuit_kind(c) == "conv");
    CHECK(n_sites(c) == 4);
    const auto* conv = std::get_if<ConvCircuit>(&c);
    REQUIRE(conv != nullptr);
    CHECK(conv->spec.pool == 1);  // default
    CHECK(conv->spec.padding == PaddingMode::identity);

    // Same seed in the JSON and in a direct draw agree.
    const ConvWeights direct = ConvWeights::random(conv->spec, 7);
    CHECK(conv->weights.head.data() == direct.head.data());
}

TEST_CASE("circuit descriptions reject malformed input") {
    CHECK_THROWS_AS(parse_circuit_json("not json", "."), Error);
    CHECK_THROWS_AS(parse_circuit_json(R"({"kind": "frob", "weights": {"seed": 1}})", "."),
                    Error);
    CHECK_THROWS_AS(
        parse_circuit_json(
            R"({"kind": "rac", "seq_len": 3, "site_dim": 2, "hidden": 2, "layers": 1})",
            "."),
        Error);  // missing weights
    CHECK_THROWS_AS(
        parse_circuit_json(R"({"kind": "rac", "seq_len": 3, "site_dim": 2, "hidden": 2,
                              "layers": 1, "weights": {"seed": 1, "dir": "x"}})",
                           "."),
        Error);  // both seed and dir
    CHECK_THROWS_WITH_AS(
        parse_circuit_json(R"({"kind": "conv", "dims": 1, "alpha": 4, "site_dim": 2,
                              "kernel": 2, "stride": 2, "layers": 2,
                              "widths": [2, 2, 2], "padding": "reflect",
                              "weights": {"seed": 1}})",
                           "."),
        doctest::Contains("padding"), Error);
}

TEST_CASE("explicit weight directories round-trip through the documented layout") {
    TempDir dir;
    const RacSpec spec{4, 2, 3, 2};
    RacWeights w = RacWeights::random(spec, 71);
    w.h0[0][1] = 0.25;  // non-default initial state must survive the round trip
    const Circuit original = RacCircuit{spec, w};
    write_circuit_weights(original, dir.file("weights"));

    write_file(dir.file("circuit.json"),
               R"({"kind": "rac", "seq_len": 4, "site_dim": 2, "hidden": 3,
                   "layers": 2, "weights": {"dir": "weights"}})");
    const Circuit back = read_circuit_file(dir.file("circuit.json"));
    const DenseTensor a = materialize(original);
    const DenseTensor b = materialize(back);
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("conv weight directories cover every window slot") {
    TempDir dir;
    ConvSpec spec;
    spec.dims = 2;
    spec.alpha = 2;
    spec.site_dim = 2;
    spec.kernel = 2;
    spec.stride = 2;
    spec.pool = 1;
    spec.layers = 1;
    spec.widths = {2, 2};
    const Circuit original = ConvCircuit{spec, ConvWeights::random(spec, 73)};
    write_circuit_weights(original, dir.file("w"));
    for (int k = 1; k <= 4; ++k) {
        CHECK(fs::exists(dir.path / "w" / ("conv_l1_k" + std::to_string(k) + ".tensor")));
    }
    write_file(dir.file("c.json"),
               R"({"kind": "conv", "dims": 2, "alpha": 2, "site_dim": 2, "kernel": 2,
                   "stride": 2, "layers": 1, "widths": [2, 2],
                   "weights": {"dir": "w"}})");
    const Circuit back = read_circuit_file(dir.file("c.json"));
    const DenseTensor a = materialize(original);
    const DenseTensor b = materialize(back);
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
