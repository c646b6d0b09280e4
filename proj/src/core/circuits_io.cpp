#include "core/circuits_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/tensor_io.hpp"

namespace tnac {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    require(!j.is_discarded(), ErrorCode::parse_error, "circuit file is not valid JSON");
    require(j.is_object(), ErrorCode::parse_error, "circuit file must hold a JSON object");
    return j;
}

template <typename T>
T field(const json& j, const char* key) {
    require(j.contains(key), ErrorCode::parse_error,
            std::string("circuit file missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::parse_error, std::string("circuit field '") + key + "' has wrong type");
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return field<T>(j, key);
}

DenseTensor load(const fs::path& dir, const std::string& name) {
    return read_tensor_file((dir / name).string());
}

ConvWeights conv_weights_from_dir(const ConvSpec& spec, const fs::path& dir) {
    ConvWeights w;
    const int slots = spec.dims == 2 ? spec.kernel * spec.kernel : spec.kernel;
    w.w.resize(static_cast<std::size_t>(spec.layers));
    for (int l = 0; l < spec.layers; ++l) {
        for (int k = 0; k < slots; ++k) {
            w.w[static_cast<std::size_t>(l)].push_back(
                load(dir, "conv_l" + std::to_string(l + 1) + "_k" + std::to_string(k + 1) +
                              ".tensor"));
        }
    }
    w.head = load(dir, "head.tensor");
    w.validate(spec);
    return w;
}

RacWeights rac_weights_from_dir(const RacSpec& spec, const fs::path& dir) {
    RacWeights w;
    for (int l = 0; l < spec.layers; ++l) {
        w.w_hidden.push_back(load(dir, "w_hidden_l" + std::to_string(l + 1) + ".tensor"));
        w.w_input.push_back(load(dir, "w_input_l" + std::to_string(l + 1) + ".tensor"));
    }
    w.w_out = load(dir, "w_out.tensor");
    for (int l = 0; l < spec.layers; ++l) {
        const fs::path h0_path = dir / ("h0_l" + std::to_string(l + 1) + ".tensor");
        if (fs::exists(h0_path)) {
            w.h0.push_back(read_tensor_file(h0_path.string()));
        } else {
            DenseTensor ones({spec.hidden});
            for (std::int64_t i = 0; i < ones.size(); ++i) ones[i] = 1.0;
            w.h0.push_back(std::move(ones));
        }
    }
    w.validate(spec);
    return w;
}

ProductWeights product_weights_from_dir(const ProductSpec& spec, const fs::path& dir) {
    ProductWeights w;
    for (int j = 0; j < spec.n; ++j) {
        w.site.push_back(load(dir, "site_" + std::to_string(j + 1) + ".tensor"));
    }
    w.validate(spec);
    return w;
}

}  // namespace

Circuit parse_circuit_json(const std::string& json_text, const std::string& base_dir) {
    const json j = parse(json_text);
    const auto kind = field<std::string>(j, "kind");

    const json weights = field<json>(j, "weights");
    require(weights.is_object() && (weights.contains("seed") != weights.contains("dir")),
            ErrorCode::parse_error,
            "'weights' must hold exactly one of {\"seed\": <u64>} or {\"dir\": <path>}");

    auto weight_dir = [&]() -> fs::path {
        fs::path p(weights.at("dir").get<std::string>());
        if (p.is_relative()) p = fs::path(base_dir) / p;
        return p;
    };

    if (kind == "conv") {
        ConvSpec spec;
        spec.dims = field<int>(j, "dims");
        spec.alpha = field<int>(j, "alpha");
        spec.site_dim = field<std::int64_t>(j, "site_dim");
        spec.kernel = field<int>(j, "kernel");
        spec.stride = field<int>(j, "stride");
        spec.pool = field_or<int>(j, "pool", 1);
        spec.layers = field<int>(j, "layers");
        spec.widths = field<std::vector<std::int64_t>>(j, "widths");
        const auto padding = field_or<std::string>(j, "padding", "identity");
        if (padding == "identity") {
            spec.padding = PaddingMode::identity;
        } else if (padding == "strict_zero") {
            spec.padding = PaddingMode::strict_zero;
        } else {
            fail(ErrorCode::parse_error, "padding must be 'identity' or 'strict_zero'");
        }
        spec.validate();
        ConvCircuit circuit{spec, weights.contains("seed")
                                      ? ConvWeights::random(spec, weights.at("seed").get<std::uint64_t>())
                                      : conv_weights_from_dir(spec, weight_dir())};
        return circuit;
    }
    if (kind == "rac") {
        RacSpec spec;
        spec.seq_len = field<int>(j, "seq_len");
        spec.site_dim = field<std::int64_t>(j, "site_dim");
        spec.hidden = field<std::int64_t>(j, "hidden");
        spec.layers = field<int>(j, "layers");
        spec.validate();
        RacCircuit circuit{spec, weights.contains("seed")
                                     ? RacWeights::random(spec, weights.at("seed").get<std::uint64_t>())
                                     : rac_weights_from_dir(spec, weight_dir())};
        return circuit;
    }
    if (kind == "product") {
        ProductSpec spec;
        spec.n = field<int>(j, "n");
        spec.site_dim = field<std::int64_t>(j, "site_dim");
        spec.validate();
        ProductCircuit circuit{
            spec, weights.contains("seed")
                      ? ProductWeights::random(spec, weights.at("seed").get<std::uint64_t>())
                      : product_weights_from_dir(spec, weight_dir())};
        return circuit;
    }
    fail(ErrorCode::parse_error, "unknown circuit kind '" + kind + "'");
}

Circuit read_circuit_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::io_error, "cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_circuit_json(buf.str(), fs::path(path).parent_path().string());
}

void write_circuit_weights(const Circuit& c, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);
    if (const auto* conv = std::get_if<ConvCircuit>(&c)) {
        for (std::size_t l = 0; l < conv->weights.w.size(); ++l) {
            for (std::size_t k = 0; k < conv->weights.w[l].size(); ++k) {
                write_tensor_file(conv->weights.w[l][k],
                                  (base / ("conv_l" + std::to_string(l + 1) + "_k" +
                                           std::to_string(k + 1) + ".tensor"))
                                      .string());
            }
        }
        write_tensor_file(conv->weights.head, (base / "head.tensor").string());
    } else if (const auto* rac = std::get_if<RacCircuit>(&c)) {
        for (std::size_t l = 0; l < rac->weights.w_hidden.size(); ++l) {
            write_tensor_file(rac->weights.w_hidden[l],
                              (base / ("w_hidden_l" + std::to_string(l + 1) + ".tensor")).string());
            write_tensor_file(rac->weights.w_input[l],
                              (base / ("w_input_l" + std::to_string(l + 1) + ".tensor")).string());
            write_tensor_file(rac->weights.h0[l],
                              (base / ("h0_l" + std::to_string(l + 1) + ".tensor")).string());
        }
        write_tensor_file(rac->weights.w_out, (base / "w_out.tensor").string());
    } else if (const auto* prod = std::get_if<ProductCircuit>(&c)) {
        for (std::size_t j = 0; j < prod->weights.site.size(); ++j) {
            write_tensor_file(prod->weights.site[j],
                              (base / ("site_" + std::to_string(j + 1) + ".tensor")).string());
        }
    }
}

}  // namespace tnac
