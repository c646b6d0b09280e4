#pragma once

#include <iosfwd>
#include <string>

#include "core/network.hpp"

namespace tnac {

// Network description file: a line-oriented text format listing node tensors
// (inline, in the tensor text format, or by file reference), bonds, and
// labeled external legs.
//
//   tnac-network v1
//   nodes <count>
//   node <id> inline
//   tnac-tensor v1
//   ...
//   node <id> file <relative-or-absolute path>
//   bonds <count>
//   bond <nodeA> <legA> <nodeB> <legB>
//   externals <count>
//   external <node> <leg> <label>
//
// File references are resolved against `base_dir` (the directory of the
// network file when reading from disk).
void write_network(std::ostream& os, const TensorNetwork& tn);
TensorNetwork read_network(std::istream& is, const std::string& base_dir = ".");

void write_network_file(const TensorNetwork& tn, const std::string& path);
TensorNetwork read_network_file(const std::string& path);

}  // namespace tnac
