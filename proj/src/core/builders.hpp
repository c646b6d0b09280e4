#pragma once

#include <string>

#include "core/circuits.hpp"
#include "core/network.hpp"

namespace tnac {

// A circuit's exact tensor-network equivalent. `groups` collapses the raw
// external legs back to one axis per input site, ordered by site index, so
// dup(contract_network(tn), groups) reproduces the circuit's amplitude tensor.
// Non-recursive constructions carry singleton groups (no duplication).
struct BuiltNetwork {
    TensorNetwork tn;
    DupGroups groups;
    std::string provenance;
};

inline constexpr int kDefaultLegBudget = 64;

// Non-overlapping conv circuit (stride == kernel, no pooling) as a tree of
// order-(K^d + 1) nodes whose entries are products of the window matrices'
// entries; requires the extent to divide evenly at every layer.
BuiltNetwork tree_tn_from_cac(const ConvSpec& spec, const ConvWeights& w);

// Shallow recurrent circuit as a matrix product state: N copies of the
// order-3 tensor a[i][j][k] = w_hidden[i][j] * w_input[i][k] with the initial
// hidden state and the output weights as boundary vectors.
BuiltNetwork mps_from_rac(const RacSpec& spec, const RacWeights& w);

// Overlapping conv circuit (stride == 1). Window overlap makes intermediate
// vectors feed several consumers, which a tensor network cannot express
// directly; every consumer therefore regenerates its producing sub-branch,
// and the resulting tree carries one duplicated external label per site.
// Refuses instances whose raw external-leg count exceeds `leg_budget`.
BuiltNetwork recursive_tree_from_cac(const ConvSpec& spec, const ConvWeights& w,
                                     int leg_budget = kDefaultLegBudget);

// Depth-2 recurrent circuit: each first-layer hidden state feeds both the
// next time step and the layer above, so the chain feeding the second layer
// is regenerated at every step (site j ends up duplicated N - j + 1 times).
BuiltNetwork recursive_mps_from_rac(const RacSpec& spec, const RacWeights& w,
                                    int leg_budget = kDefaultLegBudget);

// Selects the matching construction from the circuit's architecture.
BuiltNetwork build_equivalent_network(const Circuit& c,
                                      int leg_budget = kDefaultLegBudget);

}  // namespace tnac
