#include "core/tensor_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tnac {

namespace {
constexpr const char* kMagic = "tnac-tensor v1";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_tensor(std::ostream& os, const DenseTensor& t) {
    os << kMagic << "\n";
    os << "order " << t.order() << "\n";
    os << "shape";
    for (auto e : t.shape()) os << " " << e;
    os << "\n";
    os << "data\n";
    for (std::int64_t i = 0; i < t.size(); ++i) {
        os << format_double(t[i]) << "\n";
    }
}

DenseTensor read_tensor(std::istream& is) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)) && line == kMagic,
            ErrorCode::parse_error, "missing tensor header '" + std::string(kMagic) + "'");

    std::string word;
    int order = -1;
    require(static_cast<bool>(is >> word) && word == "order" && static_cast<bool>(is >> order) &&
                order >= 0,
            ErrorCode::parse_error, "malformed 'order' line");

    require(static_cast<bool>(is >> word) && word == "shape", ErrorCode::parse_error,
            "malformed 'shape' line");
    std::vector<std::int64_t> shape(static_cast<std::size_t>(order));
    for (auto& e : shape) {
        require(static_cast<bool>(is >> e), ErrorCode::parse_error, "truncated shape");
    }

    require(static_cast<bool>(is >> word) && word == "data", ErrorCode::parse_error,
            "missing 'data' line");

    DenseTensor t(shape);
    for (std::int64_t i = 0; i < t.size(); ++i) {
        require(static_cast<bool>(is >> t[i]), ErrorCode::parse_error,
                "truncated tensor data at entry " + std::to_string(i));
    }
    return t;
}

void write_tensor_file(const DenseTensor& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), ErrorCode::io_error, "cannot open '" + path + "' for writing");
    write_tensor(os, t);
    require(os.good(), ErrorCode::io_error, "write to '" + path + "' failed");
}

DenseTensor read_tensor_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::io_error, "cannot open '" + path + "' for reading");
    return read_tensor(is);
}

}  // namespace tnac
