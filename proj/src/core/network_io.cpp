#include "core/network_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/tensor_io.hpp"

namespace tnac {

namespace {
constexpr const char* kMagic = "tnac-network v1";
}

void write_network(std::ostream& os, const TensorNetwork& tn) {
    os << kMagic << "\n";
    os << "nodes " << tn.num_nodes() << "\n";
    for (int i = 0; i < tn.num_nodes(); ++i) {
        os << "node " << i << " inline\n";
        write_tensor(os, tn.nodes()[static_cast<std::size_t>(i)]);
    }
    os << "bonds " << tn.bonds().size() << "\n";
    for (const auto& b : tn.bonds()) {
        os << "bond " << b.a.node << " " << b.a.leg << " " << b.b.node << " " << b.b.leg
           << "\n";
    }
    os << "externals " << tn.externals().size() << "\n";
    for (const auto& e : tn.externals()) {
        os << "external " << e.node << " " << e.leg << " " << e.label << "\n";
    }
}

TensorNetwork read_network(std::istream& is, const std::string& base_dir) {
    std::string line, word;
    require(static_cast<bool>(std::getline(is, line)) && line == kMagic,
            ErrorCode::parse_error, "missing network header '" + std::string(kMagic) + "'");

    int node_count = -1;
    require(static_cast<bool>(is >> word) && word == "nodes" &&
                static_cast<bool>(is >> node_count) && node_count >= 0,
            ErrorCode::parse_error, "malformed 'nodes' line");

    std::vector<DenseTensor> nodes;
    nodes.reserve(static_cast<std::size_t>(node_count));
    for (int i = 0; i < node_count; ++i) {
        int id = -1;
        std::string kind;
        require(static_cast<bool>(is >> word) && word == "node" &&
                    static_cast<bool>(is >> id >> kind),
                ErrorCode::parse_error, "malformed 'node' line");
        require(id == i, ErrorCode::parse_error,
                "node ids must be sequential, expected " + std::to_string(i) + " got " +
                    std::to_string(id));
        if (kind == "inline") {
            is >> std::ws;
            nodes.push_back(read_tensor(is));
        } else if (kind == "file") {
            std::string path;
            require(static_cast<bool>(is >> path), ErrorCode::parse_error,
                    "node file reference missing path");
            std::filesystem::path p(path);
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            nodes.push_back(read_tensor_file(p.string()));
        } else {
            fail(ErrorCode::parse_error, "unknown node storage kind '" + kind + "'");
        }
    }

    int bond_count = -1;
    require(static_cast<bool>(is >> word) && word == "bonds" &&
                static_cast<bool>(is >> bond_count) && bond_count >= 0,
            ErrorCode::parse_error, "malformed 'bonds' line");
    std::vector<Bond> bonds;
    bonds.reserve(static_cast<std::size_t>(bond_count));
    for (int i = 0; i < bond_count; ++i) {
        Bond b;
        require(static_cast<bool>(is >> word) && word == "bond" &&
                    static_cast<bool>(is >> b.a.node >> b.a.leg >> b.b.node >> b.b.leg),
                ErrorCode::parse_error, "malformed 'bond' line");
        bonds.push_back(b);
    }

    int ext_count = -1;
    require(static_cast<bool>(is >> word) && word == "externals" &&
                static_cast<bool>(is >> ext_count) && ext_count >= 0,
            ErrorCode::parse_error, "malformed 'externals' line");
    std::vector<ExternalLeg> externals;
    externals.reserve(static_cast<std::size_t>(ext_count));
    for (int i = 0; i < ext_count; ++i) {
        ExternalLeg e;
        require(static_cast<bool>(is >> word) && word == "external" &&
                    static_cast<bool>(is >> e.node >> e.leg >> e.label),
                ErrorCode::parse_error, "malformed 'external' line");
        externals.push_back(std::move(e));
    }

    return TensorNetwork(std::move(nodes), std::move(bonds), std::move(externals));
}

void write_network_file(const TensorNetwork& tn, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), ErrorCode::io_error, "cannot open '" + path + "' for writing");
    write_network(os, tn);
    require(os.good(), ErrorCode::io_error, "write to '" + path + "' failed");
}

TensorNetwork read_network_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::io_error, "cannot open '" + path + "' for reading");
    return read_network(is, std::filesystem::path(path).parent_path().string());
}

}  // namespace tnac
