#pragma once

#include <string>

#include "core/circuits.hpp"

namespace tnac {

// Circuit description files are JSON. Common keys: "kind" ("conv" | "rac" |
// "product") and "weights" ({"seed": <u64>} for a reproducible draw, or
// {"dir": <path>} pointing at tensor files in the documented layout).
//
//   conv:    dims, alpha, site_dim, kernel, stride, pool, layers, widths,
//            padding ("identity" | "strict_zero", default identity)
//   rac:     seq_len, site_dim, hidden, layers, optional "h0": "ones"
//   product: n, site_dim
//
// Weight directory layout (1-based layer indices, window slots row-major):
//   conv:    conv_l<l>_k<k>.tensor, head.tensor
//   rac:     w_hidden_l<l>.tensor, w_input_l<l>.tensor, w_out.tensor,
//            h0_l<l>.tensor (optional, defaults to all-ones)
//   product: site_<j>.tensor
Circuit read_circuit_file(const std::string& path);
Circuit parse_circuit_json(const std::string& json_text, const std::string& base_dir);

// Writes the current weights as tensor files into `dir` (created if absent).
void write_circuit_weights(const Circuit& c, const std::string& dir);

}  // namespace tnac
