#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace tnac {

struct LegRef {
    int node = 0;
    int leg = 0;
    bool operator==(const LegRef&) const = default;
};

struct Bond {
    LegRef a;
    LegRef b;
};

struct ExternalLeg {
    int node = 0;
    int leg = 0;
    std::string label;
};

// Graph of dense tensors. Every leg of every node belongs to exactly one bond
// or one external entry; bonded legs join distinct nodes (traces are not
// supported); the bond graph is connected. External labels may repeat: legs
// sharing a label are duplicated external indices with equal extents.
class TensorNetwork {
  public:
    TensorNetwork(std::vector<DenseTensor> nodes, std::vector<Bond> bonds,
                  std::vector<ExternalLeg> externals);

    const std::vector<DenseTensor>& nodes() const { return nodes_; }
    const std::vector<Bond>& bonds() const { return bonds_; }
    const std::vector<ExternalLeg>& externals() const { return externals_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    std::int64_t external_extent(int position) const;
    bool has_duplicate_labels() const;

  private:
    void validate() const;

    std::vector<DenseTensor> nodes_;
    std::vector<Bond> bonds_;
    std::vector<ExternalLeg> externals_;
};

// Grouping of raw external positions by label, groups ordered by first
// appearance. The contraction of a network has one axis per raw position;
// dup() collapses each group to a single axis.
struct DupGroups {
    std::vector<std::vector<int>> groups;
    std::vector<std::string> labels;

    int group_count() const { return static_cast<int>(groups.size()); }
    int raw_count() const;

    static DupGroups from_labels(const std::vector<std::string>& raw_labels);
    static DupGroups singletons(int n);
};

// Groups implied by a network's external labels.
DupGroups dup_groups(const TensorNetwork& tn);

inline constexpr std::int64_t kDefaultContractionBudget = std::int64_t{1} << 24;

// Full contraction to a dense tensor with one axis per raw external leg, in
// external order. Pairwise greedy order: the bonded pair with the smallest
// result is contracted first (ties broken by lowest original node ids).
// Throws budget_exceeded if any intermediate would exceed `max_elements`.
DenseTensor contract_network(const TensorNetwork& tn,
                             std::int64_t max_elements = kDefaultContractionBudget);

// Same result through a seeded random contraction order; used to check
// order-independence.
DenseTensor contract_network_shuffled(const TensorNetwork& tn, std::uint64_t seed,
                                      std::int64_t max_elements = kDefaultContractionBudget);

// Generalized diagonal slice: output axis j runs over group j, and the entry
// at (k_1..k_m) is t at the raw index assignment where every position in
// group j holds k_j. Pure index selection, no arithmetic.
DenseTensor dup(const DenseTensor& t, const DupGroups& g);

// Rewrites duplicated external legs through delta tensors: per unique label of
// multiplicity m, an order-(m+1) delta node absorbs the m raw legs and exposes
// one external leg with that label. The result has all-distinct labels and
// contracts to dup(contract_network(tn), dup_groups(tn)).
TensorNetwork attach_dup_deltas(const TensorNetwork& tn);

// Outcome of probing the order-3 candidate cloning tensor (the delta tensor,
// which is forced by requiring exact cloning of every standard-basis vector).
// `clone_of_ones` is the matrix the candidate produces for the all-ones input;
// `violation` is its max entrywise deviation from the rank-1 ones matrix, so
// any positive value witnesses that no tensor clones every vector.
struct CloningWitness {
    bool basis_cloned = false;
    DenseTensor clone_of_ones;
    double violation = 0.0;
};

CloningWitness no_cloning_witness(std::int64_t dim);

}  // namespace tnac
