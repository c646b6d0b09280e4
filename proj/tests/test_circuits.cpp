#include "core/circuits.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "test_helpers.hpp"

using namespace tnac;
using namespace tnac::testing;

namespace {

ConvSpec conv_1d(int alpha, std::int64_t m, int kernel, int stride, int layers,
                 std::int64_t width, int pool = 1) {
    ConvSpec spec;
    spec.dims = 1;
    spec.alpha = alpha;
    spec.site_dim = m;
    spec.kernel = kernel;
    spec.stride = stride;
    spec.pool = pool;
    spec.layers = layers;
    spec.widths.assign(static_cast<std::size_t>(layers) + 1, width);
    spec.widths[0] = m;
    return spec;
}

ConvWeights identity_weights(const ConvSpec& spec, const std::vector<double>& head) {
    ConvWeights w;
    w.w.resize(static_cast<std::size_t>(spec.layers));
    const int slots = spec.dims == 2 ? spec.kernel * spec.kernel : spec.kernel;
    for (int l = 0; l < spec.layers; ++l) {
        for (int k = 0; k < slots; ++k) {
            w.w[static_cast<std::size_t>(l)].push_back(
                DenseTensor::delta(2, spec.site_dim));
        }
    }
    w.head = DenseTensor({static_cast<std::int64_t>(head.size())}, head);
    return w;
}

BasisConfig cfg(std::vector<std::int64_t> s) { return BasisConfig{std::move(s)}; }

}  // namespace

TEST_CASE("spec validation") {
    ConvSpec bad = conv_1d(4, 2, 2, 3, 1, 2);
    CHECK_THROWS_AS(bad.validate(), Error);  // stride neither 1 nor kernel
    ConvSpec wrong_r0 = conv_1d(4, 2, 2, 2, 1, 2);
    wrong_r0.widths[0] = 3;
    CHECK_THROWS_AS(wrong_r0.validate(), Error);
    RacSpec deep3{4, 2, 2, 3};
    CHECK_THROWS_AS(deep3.validate(), Error);
}

TEST_CASE("identity-weight non-overlapping circuits select uniform configurations") {
    const ConvSpec spec = conv_1d(4, 2, 2, 2, 2, 2);
    const ConvWeights w = identity_weights(spec, {1.0, 5.0});
    for (std::int64_t s1 = 0; s1 < 2; ++s1) {
        for (std::int64_t s2 = 0; s2 < 2; ++s2) {
            for (std::int64_t s3 = 0; s3 < 2; ++s3) {
                for (std::int64_t s4 = 0; s4 < 2; ++s4) {
                    const double y = cac_forward(spec, w, cfg({s1, s2, s3, s4}));
                    const bool uniform = s1 == s2 && s2 == s3 && s3 == s4;
                    const double expect = !uniform ? 0.0 : (s1 == 0 ? 1.0 : 5.0);
                    CHECK(y == expect);
                }
            }
        }
    }
}

TEST_CASE("2D single-window circuit matches a hand computation") {
    ConvSpec spec;
    spec.dims = 2;
    spec.alpha = 2;
    spec.site_dim = 2;
    spec.kernel = 2;
    spec.stride = 2;
    spec.pool = 1;
    spec.layers = 1;
    spec.widths = {2, 3};
    const ConvWeights w = ConvWeights::random(spec, 99);

    const BasisConfig c = cfg({1, 0, 0, 1});
    std::vector<double> acc(3, 1.0);
    for (int slot = 0; slot < 4; ++slot) {
        for (int i = 0; i < 3; ++i) {
            acc[static_cast<std::size_t>(i)] *=
                w.w[0][static_cast<std::size_t>(slot)].at(
                    {i, c.s[static_cast<std::size_t>(slot)]});
        }
    }
    double want = 0.0;
    for (int i = 0; i < 3; ++i) want += w.head[i] * acc[static_cast<std::size_t>(i)];
    CHECK(cac_forward(spec, w, c) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("single-step recurrence has a closed form") {
    const RacSpec spec{1, 3, 2, 1};
    const RacWeights w = RacWeights::random(spec, 5);
    for (std::int64_t s = 0; s < 3; ++s) {
        // h1 = (Wh h0) .* (Wi e_s), y = w_out . h1, h0 = ones.
        double want = 0.0;
        for (std::int64_t i = 0; i < 2; ++i) {
            double wh_row = 0.0;
            for (std::int64_t j = 0; j < 2; ++j) wh_row += w.w_hidden[0].at({i, j});
            want += w.w_out[i] * wh_row * w.w_input[0].at({i, s});
        }
        CHECK(rac_forward(spec, w, cfg({s})) == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("forward evaluation rejects inconsistent inputs") {
    const ConvSpec spec = conv_1d(4, 2, 2, 2, 1, 2);
    const ConvWeights w = ConvWeights::random(spec, 1);
    CHECK_THROWS_AS(cac_forward(spec, w, cfg({0, 1})), Error);
    CHECK_THROWS_AS(cac_forward(spec, w, cfg({0, 1, 0, 2})), Error);
    ConvWeights truncated = w;
    truncated.w[0].pop_back();
    CHECK_THROWS_AS(cac_forward(spec, truncated, cfg({0, 1, 0, 1})), Error);
}

TEST_CASE("materialize enumerates configurations lexicographically") {
    const auto indicator = [](const BasisConfig& c) {
        return c.s[0] == 1 && c.s[1] == 1 ? 1.0 : 0.0;
    };
    DenseTensor t = materialize(indicator, 2, 2);
    CHECK(t.at({0, 0}) == 0.0);
    CHECK(t.at({0, 1}) == 0.0);
    CHECK(t.at({1, 0}) == 0.0);
    CHECK(t.at({1, 1}) == 1.0);
}

TEST_CASE("materialize enforces the entry budget") {
    const auto zero = [](const BasisConfig&) { return 0.0; };
    CHECK_THROWS_WITH_AS(materialize(zero, 21, 2, 1 << 20),
                         doctest::Contains("budget"), Error);
    CHECK_NOTHROW(materialize(zero, 20, 2, 1 << 20));
}

TEST_CASE("parameter counts") {
    ConvSpec spec;
    spec.dims = 2;
    spec.alpha = 3;
    spec.site_dim = 1;
    spec.kernel = 3;
    spec.stride = 1;
    spec.pool = 1;
    spec.layers = 1;
    spec.widths = {1, 1};
    CHECK(param_count(spec) == 9 + 1);

    // Doubling the depth with constant widths roughly doubles the count.
    ConvSpec l4 = conv_1d(16, 2, 2, 1, 4, 2);
    ConvSpec l8 = conv_1d(16, 2, 2, 1, 8, 2);
    const double ratio = static_cast<double>(param_count(l8)) /
                         static_cast<double>(param_count(l4));
    CHECK(ratio > 1.9);
    CHECK(ratio < 2.1);
}

TEST_CASE("parameter count scales like sqrt(N) for depth ~ alpha families") {
    // 2D, kernel fixed, depth L = alpha / K, N = alpha^2.
    std::vector<double> log_n, log_c;
    for (int alpha : {4, 8, 16, 32}) {
        const int layers = (alpha + 1) / 2;
        ConvSpec spec;
        spec.dims = 2;
        spec.alpha = alpha;
        spec.site_dim = 2;
        spec.kernel = 2;
        spec.stride = 1;
        spec.pool = 1;
        spec.layers = layers;
        spec.widths.assign(static_cast<std::size_t>(layers) + 1, 2);
        log_n.push_back(std::log(static_cast<double>(alpha) * alpha));
        log_c.push_back(std::log(static_cast<double>(param_count(spec))));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(log_n.size());
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_c[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_c[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("total receptive field composes through the layer stack") {
    SUBCASE("unit stride, no pooling: (K-1)l + 1") {
        const ConvSpec spec = conv_1d(16, 2, 2, 1, 3, 2);
        CHECK(total_receptive_field(spec, 1) == 2);
        CHECK(total_receptive_field(spec, 2) == 3);
        CHECK(total_receptive_field(spec, 3) == 4);
        CHECK(total_stride(spec, 3) == 1);
    }
    SUBCASE("first layer sees exactly the kernel") {
        const ConvSpec spec = conv_1d(8, 2, 3, 1, 2, 2);
        CHECK(total_receptive_field(spec, 1) == 3);
        const ConvSpec pooled = conv_1d(8, 2, 3, 1, 2, 2, 2);
        CHECK(total_receptive_field(pooled, 1) == 3);
    }
    SUBCASE("pooling widens the field and the stride") {
        const ConvSpec spec = conv_1d(32, 2, 3, 1, 2, 2, 2);
        CHECK(total_receptive_field(spec, 2) == 8);  // conv3, pool2, conv3
        CHECK(total_stride(spec, 2) == 2);
    }
    const ConvSpec spec = conv_1d(8, 2, 2, 1, 2, 2);
    CHECK_THROWS_AS(total_receptive_field(spec, 0), Error);
    CHECK_THROWS_AS(total_receptive_field(spec, 3), Error);
}

TEST_CASE("receptive fields match a brute-force dependency trace") {
    for (int pool : {1, 2}) {
        for (int kernel : {2, 3}) {
            for (int layers : {1, 2, 3}) {
                ConvSpec spec = conv_1d(64, 2, kernel, 1, layers, 2, pool);
                for (int l = 1; l <= layers; ++l) {
                    CAPTURE(pool);
                    CAPTURE(kernel);
                    CAPTURE(layers);
                    CAPTURE(l);
                    // Cell 0's window never clips at the left edge, and the
                    // input is wide enough to avoid the right edge.
                    const auto cells = reachable_input_cells(spec, l, 0);
                    CHECK(static_cast<int>(cells.size()) ==
                          total_receptive_field(spec, l));
                    CHECK(cells.front() == 0);
                    CHECK(cells.back() == total_receptive_field(spec, l) - 1);
                }
            }
        }
    }
}

TEST_CASE("path counts: non-overlapping windows touch each site once") {
    const ConvSpec spec = conv_1d(8, 2, 2, 2, 3, 2);
    const auto counts = input_path_counts(spec);
    REQUIRE(counts.size() == 8);
    for (auto c : counts) CHECK(c == 1);
}

TEST_CASE("path counts: overlapping windows re-use interior sites") {
    const ConvSpec spec = conv_1d(4, 2, 2, 1, 2, 2);
    const auto counts = input_path_counts(spec);
    REQUIRE(counts.size() == 4);
    CHECK(counts == std::vector<std::int64_t>{1, 3, 4, 4});
}

TEST_CASE("path counts: deep recurrence re-uses early sites most") {
    const RacSpec spec{3, 2, 2, 2};
    const auto counts = input_path_counts(spec);
    CHECK(counts == std::vector<std::int64_t>{3, 2, 1});
    const RacSpec shallow{5, 2, 2, 1};
    const auto ones = input_path_counts(shallow);
    for (auto c : ones) CHECK(c == 1);
}

TEST_CASE("outputs are homogeneous polynomials in each weight matrix") {
    std::mt19937_64 rng(51);
    SUBCASE("conv: scaling one window matrix scales y by c^(cells using it)") {
        const ConvSpec spec = conv_1d(4, 2, 2, 2, 2, 2);
        ConvWeights w = ConvWeights::random(spec, 3);
        const BasisConfig c = cfg({0, 1, 1, 0});
        const double base = cac_forward(spec, w, c);
        // Layer 1 has two output cells, each using slot 0 once.
        for (std::int64_t i = 0; i < w.w[0][0].size(); ++i) w.w[0][0][i] *= 3.0;
        CHECK(cac_forward(spec, w, c) == doctest::Approx(9.0 * base).epsilon(1e-12));
    }
    SUBCASE("conv: the head is linear") {
        const ConvSpec spec = conv_1d(4, 2, 2, 1, 2, 2);
        ConvWeights w = ConvWeights::random(spec, 4);
        const BasisConfig c = cfg({1, 1, 0, 1});
        const double base = cac_forward(spec, w, c);
        for (std::int64_t i = 0; i < w.head.size(); ++i) w.head[i] *= -2.5;
        CHECK(cac_forward(spec, w, c) == doctest::Approx(-2.5 * base).epsilon(1e-12));
    }
    SUBCASE("rac: input weights act once per step") {
        const RacSpec spec{5, 2, 3, 1};
        RacWeights w = RacWeights::random(spec, 6);
        const BasisConfig c = cfg({0, 1, 0, 0, 1});
        const double base = rac_forward(spec, w, c);
        for (std::int64_t i = 0; i < w.w_input[0].size(); ++i) w.w_input[0][i] *= 2.0;
        CHECK(rac_forward(spec, w, c) ==
              doctest::Approx(std::pow(2.0, 5) * base).epsilon(1e-12));
    }
    SUBCASE("rac: output weights are linear") {
        const RacSpec spec{4, 2, 3, 2};
        RacWeights w = RacWeights::random(spec, 7);
        const BasisConfig c = cfg({1, 0, 1, 1});
        const double base = rac_forward(spec, w, c);
        for (std::int64_t i = 0; i < w.w_out.size(); ++i) w.w_out[i] *= 4.0;
        CHECK(rac_forward(spec, w, c) == doctest::Approx(4.0 * base).epsilon(1e-12));
    }
}

TEST_CASE("strict-zero padding annihilates clipped products") {
    ConvSpec spec = conv_1d(4, 2, 2, 1, 1, 2);
    spec.padding = PaddingMode::strict_zero;
    const ConvWeights w = ConvWeights::random(spec, 8);
    // The rightmost window clips, its product vanishes, and the global
    // product pooling drags every amplitude to zero.
    for (std::int64_t s1 = 0; s1 < 2; ++s1) {
        for (std::int64_t s2 = 0; s2 < 2; ++s2) {
            CHECK(cac_forward(spec, w, cfg({s1, s2, 0, 1})) == 0.0);
        }
    }

    // Without clipping both padding modes agree.
    ConvSpec aligned = conv_1d(4, 2, 2, 2, 2, 2);
    ConvWeights wa = ConvWeights::random(aligned, 9);
    ConvSpec aligned_strict = aligned;
    aligned_strict.padding = PaddingMode::strict_zero;
    const BasisConfig c = cfg({0, 1, 1, 0});
    CHECK(cac_forward(aligned, wa, c) == cac_forward(aligned_strict, wa, c));
}

TEST_CASE("product circuits factorize") {
    const ProductSpec spec{3, 2};
    const ProductWeights w = ProductWeights::random(spec, 11);
    const double y = product_forward(spec, w, cfg({1, 0, 1}));
    CHECK(y == doctest::Approx(w.site[0][1] * w.site[1][0] * w.site[2][1]).epsilon(1e-14));
}

TEST_CASE("circuit variant helpers") {
    Circuit c = RacCircuit{{4, 2, 2, 1}, RacWeights::random({4, 2, 2, 1}, 0)};
    CHECK(n_sites(c) == 4);
    CHECK(site_dim(c) == 2);
    CHECK(circuit_kind(c) == "rac");
    randomize(c, 42);
    const DenseTensor t1 = materialize(c);
    randomize(c, 42);
    const DenseTensor t2 = materialize(c);
    for (std::int64_t i = 0; i < t1.size(); ++i) CHECK(t1[i] == t2[i]);
}
