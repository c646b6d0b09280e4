#include "core/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "core/rng.hpp"

namespace tnac {

TensorNetwork::TensorNetwork(std::vector<DenseTensor> nodes, std::vector<Bond> bonds,
                             std::vector<ExternalLeg> externals)
    : nodes_(std::move(nodes)), bonds_(std::move(bonds)), externals_(std::move(externals)) {
    validate();
}

std::int64_t TensorNetwork::external_extent(int position) const {
    const auto& e = externals_[static_cast<std::size_t>(position)];
    return nodes_[static_cast<std::size_t>(e.node)].extent(e.leg);
}

bool TensorNetwork::has_duplicate_labels() const {
    std::map<std::string, int> seen;
    for (const auto& e : externals_) {
        if (++seen[e.label] > 1) return true;
    }
    return false;
}

void TensorNetwork::validate() const {
    require(!nodes_.empty(), ErrorCode::invalid_argument, "network has no nodes");
    const int n = num_nodes();

    auto check_ref = [&](const LegRef& r, const char* what) {
        require(r.node >= 0 && r.node < n, ErrorCode::invalid_argument,
                std::string(what) + " references node " + std::to_string(r.node) +
                    " out of range");
        require(r.leg >= 0 && r.leg < nodes_[static_cast<std::size_t>(r.node)].order(),
                ErrorCode::invalid_argument,
                std::string(what) + " references leg " + std::to_string(r.leg) +
                    " out of range on node " + std::to_string(r.node));
    };

    // Occupancy: each leg in exactly one bond or one external entry.
    std::vector<std::vector<int>> seen(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        seen[static_cast<std::size_t>(i)].assign(
            static_cast<std::size_t>(nodes_[static_cast<std::size_t>(i)].order()), 0);
    }
    auto occupy = [&](const LegRef& r, const char* what) {
        check_ref(r, what);
        int& c = seen[static_cast<std::size_t>(r.node)][static_cast<std::size_t>(r.leg)];
        require(c == 0, ErrorCode::invalid_argument,
                "leg (" + std::to_string(r.node) + "," + std::to_string(r.leg) +
                    ") used more than once");
        c = 1;
    };

    for (const auto& b : bonds_) {
        occupy(b.a, "bond");
        occupy(b.b, "bond");
        require(b.a.node != b.b.node, ErrorCode::invalid_argument,
                "bond joins node " + std::to_string(b.a.node) + " to itself");
        require(nodes_[static_cast<std::size_t>(b.a.node)].extent(b.a.leg) ==
                    nodes_[static_cast<std::size_t>(b.b.node)].extent(b.b.leg),
                ErrorCode::shape_mismatch,
                "bond (" + std::to_string(b.a.node) + "," + std::to_string(b.a.leg) + ")-(" +
                    std::to_string(b.b.node) + "," + std::to_string(b.b.leg) +
                    ") joins unequal extents");
    }
    std::map<std::string, std::int64_t> label_extent;
    for (const auto& e : externals_) {
        occupy({e.node, e.leg}, "external leg");
        const std::int64_t ext = nodes_[static_cast<std::size_t>(e.node)].extent(e.leg);
        auto [it, inserted] = label_extent.emplace(e.label, ext);
        require(inserted || it->second == ext, ErrorCode::shape_mismatch,
                "external label '" + e.label + "' spans unequal extents");
    }
    for (int i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < seen[static_cast<std::size_t>(i)].size(); ++l) {
            require(seen[static_cast<std::size_t>(i)][l] == 1, ErrorCode::invalid_argument,
                    "dangling leg (" + std::to_string(i) + "," + std::to_string(l) + ")");
        }
    }

    // Connectivity over bonds.
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (const auto& b : bonds_) {
        parent[static_cast<std::size_t>(find(b.a.node))] = find(b.b.node);
    }
    for (int i = 1; i < n; ++i) {
        require(find(i) == find(0), ErrorCode::invalid_argument,
                "network is disconnected (node " + std::to_string(i) +
                    " unreachable from node 0)");
    }
}

int DupGroups::raw_count() const {
    int total = 0;
    for (const auto& g : groups) total += static_cast<int>(g.size());
    return total;
}

DupGroups DupGroups::from_labels(const std::vector<std::string>& raw_labels) {
    DupGroups g;
    std::map<std::string, int> index;
    for (int pos = 0; pos < static_cast<int>(raw_labels.size()); ++pos) {
        auto [it, inserted] = index.emplace(raw_labels[pos], g.group_count());
        if (inserted) {
            g.groups.emplace_back();
            g.labels.push_back(raw_labels[pos]);
        }
        g.groups[static_cast<std::size_t>(it->second)].push_back(pos);
    }
    return g;
}

DupGroups DupGroups::singletons(int n) {
    DupGroups g;
    for (int i = 0; i < n; ++i) {
        g.groups.push_back({i});
        g.labels.push_back("e" + std::to_string(i));
    }
    return g;
}

DupGroups dup_groups(const TensorNetwork& tn) {
    std::vector<std::string> labels;
    labels.reserve(tn.externals().size());
    for (const auto& e : tn.externals()) labels.push_back(e.label);
    return DupGroups::from_labels(labels);
}

namespace {

// One live intermediate during contraction: the tensor plus, per leg, either
// the bond id it participates in or the external position it carries.
struct LiveItem {
    DenseTensor tensor;
    std::vector<int> bond_of_leg;      // -1 when external
    std::vector<int> external_of_leg;  // -1 when bonded
    int min_node_id = 0;               // smallest original node id merged in
};

DenseTensor contract_impl(const TensorNetwork& tn, std::int64_t max_elements,
                          GaussianStream* shuffle) {
    std::vector<std::optional<LiveItem>> live;
    live.reserve(tn.nodes().size());
    for (int i = 0; i < tn.num_nodes(); ++i) {
        LiveItem item;
        item.tensor = tn.nodes()[static_cast<std::size_t>(i)];
        item.bond_of_leg.assign(static_cast<std::size_t>(item.tensor.order()), -1);
        item.external_of_leg.assign(static_cast<std::size_t>(item.tensor.order()), -1);
        item.min_node_id = i;
        live.push_back(std::move(item));
    }
    for (int b = 0; b < static_cast<int>(tn.bonds().size()); ++b) {
        const auto& bond = tn.bonds()[static_cast<std::size_t>(b)];
        live[static_cast<std::size_t>(bond.a.node)]->bond_of_leg[static_cast<std::size_t>(
            bond.a.leg)] = b;
        live[static_cast<std::size_t>(bond.b.node)]->bond_of_leg[static_cast<std::size_t>(
            bond.b.leg)] = b;
    }
    for (int e = 0; e < static_cast<int>(tn.externals().size()); ++e) {
        const auto& ext = tn.externals()[static_cast<std::size_t>(e)];
        live[static_cast<std::size_t>(ext.node)]->external_of_leg[static_cast<std::size_t>(
            ext.leg)] = e;
    }
    // Owner item of each bond endpoint, updated as items merge.
    std::vector<std::pair<int, int>> bond_owner(tn.bonds().size());
    for (int b = 0; b < static_cast<int>(tn.bonds().size()); ++b) {
        bond_owner[static_cast<std::size_t>(b)] = {tn.bonds()[static_cast<std::size_t>(b)].a.node,
                                                   tn.bonds()[static_cast<std::size_t>(b)].b.node};
    }

    int bonds_left = static_cast<int>(tn.bonds().size());
    while (bonds_left > 0) {
        // Candidate pairs joined by at least one bond.
        std::map<std::pair<int, int>, std::int64_t> result_sizes;
        for (int b = 0; b < static_cast<int>(tn.bonds().size()); ++b) {
            auto [i, j] = bond_owner[static_cast<std::size_t>(b)];
            if (i < 0) continue;  // consumed
            auto key = std::minmax(i, j);
            std::pair<int, int> pk{key.first, key.second};
            if (result_sizes.count(pk)) continue;
            std::int64_t size = 1;
            for (const auto& item : {live[static_cast<std::size_t>(pk.first)],
                                     live[static_cast<std::size_t>(pk.second)]}) {
                for (std::size_t l = 0; l < item->bond_of_leg.size(); ++l) {
                    const int bid = item->bond_of_leg[l];
                    const bool joins_pair =
                        bid >= 0 &&
                        std::minmax(bond_owner[static_cast<std::size_t>(bid)].first,
                                    bond_owner[static_cast<std::size_t>(bid)].second) ==
                            std::minmax(pk.first, pk.second);
                    if (!joins_pair) size *= item->tensor.extent(static_cast<int>(l));
                }
            }
            result_sizes[pk] = size;
        }

        std::pair<int, int> chosen{-1, -1};
        if (shuffle != nullptr) {
            const auto pick =
                static_cast<std::size_t>(shuffle->next_u64() % result_sizes.size());
            auto it = result_sizes.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(pick));
            chosen = it->first;
        } else {
            std::int64_t best = -1;
            for (const auto& [pk, size] : result_sizes) {
                const auto id_i = live[static_cast<std::size_t>(pk.first)]->min_node_id;
                const auto id_j = live[static_cast<std::size_t>(pk.second)]->min_node_id;
                if (best < 0 || size < best ||
                    (size == best &&
                     std::pair(id_i, id_j) <
                         std::pair(live[static_cast<std::size_t>(chosen.first)]->min_node_id,
                                   live[static_cast<std::size_t>(chosen.second)]->min_node_id))) {
                    best = size;
                    chosen = pk;
                }
            }
            require(best <= max_elements, ErrorCode::budget_exceeded,
                    "contraction intermediate of " + std::to_string(best) +
                        " elements exceeds budget of " + std::to_string(max_elements));
        }

        auto& lhs = *live[static_cast<std::size_t>(chosen.first)];
        auto& rhs = *live[static_cast<std::size_t>(chosen.second)];
        std::vector<ContractionPair> pairs;
        std::vector<int> rhs_leg_of_bond(tn.bonds().size(), -1);
        for (std::size_t l = 0; l < rhs.bond_of_leg.size(); ++l) {
            if (rhs.bond_of_leg[l] >= 0) {
                rhs_leg_of_bond[static_cast<std::size_t>(rhs.bond_of_leg[l])] =
                    static_cast<int>(l);
            }
        }
        for (std::size_t l = 0; l < lhs.bond_of_leg.size(); ++l) {
            const int bid = lhs.bond_of_leg[l];
            if (bid >= 0 && rhs_leg_of_bond[static_cast<std::size_t>(bid)] >= 0) {
                pairs.emplace_back(static_cast<int>(l),
                                   rhs_leg_of_bond[static_cast<std::size_t>(bid)]);
            }
        }

        if (shuffle != nullptr) {
            std::int64_t size = 1;
            for (std::size_t l = 0; l < lhs.bond_of_leg.size(); ++l) {
                bool contracted = false;
                for (const auto& pr : pairs) contracted |= pr.first == static_cast<int>(l);
                if (!contracted) size *= lhs.tensor.extent(static_cast<int>(l));
            }
            for (std::size_t l = 0; l < rhs.bond_of_leg.size(); ++l) {
                bool contracted = false;
                for (const auto& pr : pairs) contracted |= pr.second == static_cast<int>(l);
                if (!contracted) size *= rhs.tensor.extent(static_cast<int>(l));
            }
            require(size <= max_elements, ErrorCode::budget_exceeded,
                    "contraction intermediate of " + std::to_string(size) +
                        " elements exceeds budget of " + std::to_string(max_elements));
        }

        LiveItem merged;
        merged.tensor = contract(lhs.tensor, rhs.tensor, pairs);
        merged.min_node_id = std::min(lhs.min_node_id, rhs.min_node_id);
        for (const LiveItem* item : {&lhs, &rhs}) {
            const bool is_lhs = item == &lhs;
            for (std::size_t l = 0; l < item->bond_of_leg.size(); ++l) {
                bool contracted = false;
                for (const auto& pr : pairs) {
                    contracted |= (is_lhs ? pr.first : pr.second) == static_cast<int>(l);
                }
                if (contracted) continue;
                merged.bond_of_leg.push_back(item->bond_of_leg[l]);
                merged.external_of_leg.push_back(item->external_of_leg[l]);
            }
        }
        bonds_left -= static_cast<int>(pairs.size());
        for (auto& owner : bond_owner) {
            auto relabel = [&](int& x) {
                if (x == chosen.second) x = chosen.first;
            };
            relabel(owner.first);
            relabel(owner.second);
        }
        for (std::size_t b = 0; b < bond_owner.size(); ++b) {
            if (bond_owner[b].first == bond_owner[b].second) {
                bond_owner[b] = {-1, -1};  // consumed by this merge
            }
        }
        live[static_cast<std::size_t>(chosen.first)] = std::move(merged);
        live[static_cast<std::size_t>(chosen.second)].reset();
    }

    LiveItem* last = nullptr;
    for (auto& item : live) {
        if (item.has_value()) {
            require(last == nullptr, ErrorCode::internal,
                    "contraction finished with multiple components");
            last = &*item;
        }
    }
    require(last != nullptr, ErrorCode::internal, "contraction lost all items");

    // Permute remaining legs into external order.
    std::vector<int> perm(static_cast<std::size_t>(last->tensor.order()));
    for (std::size_t l = 0; l < last->external_of_leg.size(); ++l) {
        const int pos = last->external_of_leg[l];
        require(pos >= 0, ErrorCode::internal, "free leg without external position");
        perm[static_cast<std::size_t>(pos)] = static_cast<int>(l);
    }
    return permute(last->tensor, perm);
}

}  // namespace

DenseTensor contract_network(const TensorNetwork& tn, std::int64_t max_elements) {
    return contract_impl(tn, max_elements, nullptr);
}

DenseTensor contract_network_shuffled(const TensorNetwork& tn, std::uint64_t seed,
                                      std::int64_t max_elements) {
    GaussianStream stream(seed);
    return contract_impl(tn, max_elements, &stream);
}

DenseTensor dup(const DenseTensor& t, const DupGroups& g) {
    require(g.raw_count() == t.order(), ErrorCode::shape_mismatch,
            "dup groups cover " + std::to_string(g.raw_count()) +
                " positions but tensor has order " + std::to_string(t.order()));
    std::vector<std::int64_t> out_shape;
    out_shape.reserve(g.groups.size());
    for (const auto& group : g.groups) {
        require(!group.empty(), ErrorCode::invalid_argument, "empty dup group");
        const std::int64_t ext = t.extent(group.front());
        for (int pos : group) {
            require(pos >= 0 && pos < t.order(), ErrorCode::invalid_argument,
                    "dup group position out of range");
            require(t.extent(pos) == ext, ErrorCode::shape_mismatch,
                    "dup group spans unequal extents");
        }
        out_shape.push_back(ext);
    }

    DenseTensor out(out_shape);
    const auto in_strides = t.strides();
    // Stride of output axis j in the input layout: sum over its group members.
    std::vector<std::int64_t> group_strides(g.groups.size(), 0);
    for (std::size_t j = 0; j < g.groups.size(); ++j) {
        for (int pos : g.groups[j]) {
            group_strides[j] += in_strides[static_cast<std::size_t>(pos)];
        }
    }
    std::vector<std::int64_t> idx(g.groups.size(), 0);
    std::int64_t src = 0;
    for (std::int64_t flat = 0; flat < out.size(); ++flat) {
        out[flat] = t[src];
        for (int axis = static_cast<int>(g.groups.size()) - 1; axis >= 0; --axis) {
            auto ua = static_cast<std::size_t>(axis);
            if (++idx[ua] < out_shape[ua]) {
                src += group_strides[ua];
                break;
            }
            idx[ua] = 0;
            src -= group_strides[ua] * (out_shape[ua] - 1);
        }
    }
    return out;
}

TensorNetwork attach_dup_deltas(const TensorNetwork& tn) {
    const DupGroups groups = dup_groups(tn);
    std::vector<DenseTensor> nodes = tn.nodes();
    std::vector<Bond> bonds = tn.bonds();
    std::vector<ExternalLeg> externals;

    for (std::size_t j = 0; j < groups.groups.size(); ++j) {
        const auto& members = groups.groups[j];
        const std::int64_t ext = tn.external_extent(members.front());
        const int delta_node = static_cast<int>(nodes.size());
        nodes.push_back(DenseTensor::delta(static_cast<int>(members.size()) + 1, ext));
        for (std::size_t k = 0; k < members.size(); ++k) {
            const auto& raw = tn.externals()[static_cast<std::size_t>(members[k])];
            bonds.push_back({{raw.node, raw.leg}, {delta_node, static_cast<int>(k)}});
        }
        externals.push_back(
            {delta_node, static_cast<int>(members.size()), groups.labels[j]});
    }
    return TensorNetwork(std::move(nodes), std::move(bonds), std::move(externals));
}

CloningWitness no_cloning_witness(std::int64_t dim) {
    require(dim >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
    const DenseTensor candidate = DenseTensor::delta(3, dim);

    CloningWitness witness;
    witness.basis_cloned = true;
    for (std::int64_t alpha = 0; alpha < dim && witness.basis_cloned; ++alpha) {
        const std::vector<ContractionPair> first_axis{{0, 0}};
        const DenseTensor clone =
            contract(candidate, DenseTensor::basis_vector(dim, alpha), first_axis);
        for (std::int64_t j = 0; j < dim; ++j) {
            for (std::int64_t k = 0; k < dim; ++k) {
                const double want = (j == alpha && k == alpha) ? 1.0 : 0.0;
                if (clone.at({j, k}) != want) witness.basis_cloned = false;
            }
        }
    }

    DenseTensor ones({dim});
    for (std::int64_t i = 0; i < dim; ++i) ones[i] = 1.0;
    const std::vector<ContractionPair> first_axis{{0, 0}};
    witness.clone_of_ones = contract(candidate, ones, first_axis);
    double violation = 0.0;
    for (std::int64_t j = 0; j < dim; ++j) {
        for (std::int64_t k = 0; k < dim; ++k) {
            violation = std::max(violation, std::abs(witness.clone_of_ones.at({j, k}) - 1.0));
        }
    }
    witness.violation = violation;
    return witness;
}

}  // namespace tnac
