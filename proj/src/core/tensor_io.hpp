#pragma once

#include <iosfwd>
#include <string>

#include "core/tensor.hpp"

namespace tnac {

// Text serialization, one value per line after a fixed header:
//
//   tnac-tensor v1
//   order 2
//   shape 2 3
//   data
//   <6 lines, row-major, printf %.17g>
//
// %.17g round-trips doubles exactly, so write/read is lossless and the byte
// stream is deterministic for a given tensor.
void write_tensor(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor(std::istream& is);

void write_tensor_file(const DenseTensor& t, const std::string& path);
DenseTensor read_tensor_file(const std::string& path);

// Formatting used for all numeric text output (files, CSV, reports).
std::string format_double(double v);

}  // namespace tnac
