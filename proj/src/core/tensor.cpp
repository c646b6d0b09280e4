#include "core/tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tnac {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string shape_string(const std::vector<std::int64_t>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

}  // namespace

std::int64_t DenseTensor::checked_size(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (auto e : shape) {
        require(e >= 1, ErrorCode::invalid_argument,
                "tensor extent must be positive, got " + std::to_string(e));
        require(n <= std::numeric_limits<std::int64_t>::max() / e,
                ErrorCode::invalid_argument, "tensor size overflows int64");
        n *= e;
    }
    return n;
}

DenseTensor DenseTensor::scalar(double value) {
    DenseTensor t;
    t.data_[0] = value;
    return t;
}

DenseTensor DenseTensor::delta(int order, std::int64_t dim) {
    require(order >= 1, ErrorCode::invalid_argument, "delta order must be >= 1");
    require(dim >= 1, ErrorCode::invalid_argument, "delta dim must be >= 1");
    DenseTensor t(std::vector<std::int64_t>(static_cast<std::size_t>(order), dim));
    // Flat index of (k,k,...,k) is k * (dim^order - 1) / (dim - 1).
    std::int64_t stride_sum = 0;
    std::int64_t s = 1;
    for (int i = 0; i < order; ++i) {
        stride_sum += s;
        s *= dim;
    }
    for (std::int64_t k = 0; k < dim; ++k) t[k * stride_sum] = 1.0;
    return t;
}

DenseTensor DenseTensor::basis_vector(std::int64_t dim, std::int64_t index) {
    require(index >= 0 && index < dim, ErrorCode::invalid_argument,
            "basis index out of range");
    DenseTensor t(std::vector<std::int64_t>{dim});
    t[index] = 1.0;
    return t;
}

std::vector<std::int64_t> DenseTensor::strides() const {
    std::vector<std::int64_t> s(shape_.size(), 1);
    for (int i = static_cast<int>(shape_.size()) - 2; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] =
            s[static_cast<std::size_t>(i) + 1] * shape_[static_cast<std::size_t>(i) + 1];
    }
    return s;
}

std::int64_t DenseTensor::flat_index(std::span<const std::int64_t> idx) const {
    require(idx.size() == shape_.size(), ErrorCode::invalid_argument,
            "index order does not match tensor order");
    std::int64_t flat = 0;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        require(idx[i] >= 0 && idx[i] < shape_[i], ErrorCode::invalid_argument,
                "index out of range on axis " + std::to_string(i));
        flat = flat * shape_[i] + idx[i];
    }
    return flat;
}

double DenseTensor::frobenius_norm() const {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return std::sqrt(sum);
}

double DenseTensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

DenseTensor permute(const DenseTensor& t, std::span<const int> perm) {
    const int k = t.order();
    require(static_cast<int>(perm.size()) == k, ErrorCode::invalid_argument,
            "permutation length does not match tensor order");
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (int axis : perm) {
        require(axis >= 0 && axis < k, ErrorCode::invalid_argument,
                "permutation entry out of range");
        require(!seen[static_cast<std::size_t>(axis)], ErrorCode::invalid_argument,
                "permutation repeats axis " + std::to_string(axis));
        seen[static_cast<std::size_t>(axis)] = 1;
    }
    std::vector<std::int64_t> out_shape(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        out_shape[static_cast<std::size_t>(i)] = t.extent(perm[static_cast<std::size_t>(i)]);
    }
    DenseTensor out(out_shape);
    if (k == 0) {
        out[0] = t[0];
        return out;
    }
    const auto in_strides = t.strides();
    // Stride of output axis i in the *input* flat layout.
    std::vector<std::int64_t> map_strides(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        map_strides[static_cast<std::size_t>(i)] =
            in_strides[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    std::vector<std::int64_t> idx(static_cast<std::size_t>(k), 0);
    std::int64_t src = 0;
    const std::int64_t total = out.size();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        out[flat] = t[src];
        for (int axis = k - 1; axis >= 0; --axis) {
            auto ua = static_cast<std::size_t>(axis);
            if (++idx[ua] < out_shape[ua]) {
                src += map_strides[ua];
                break;
            }
            idx[ua] = 0;
            src -= map_strides[ua] * (out_shape[ua] - 1);
        }
    }
    return out;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const ContractionPair> pairs) {
    std::vector<char> used_a(static_cast<std::size_t>(a.order()), 0);
    std::vector<char> used_b(static_cast<std::size_t>(b.order()), 0);
    for (const auto& [ia, ib] : pairs) {
        require(ia >= 0 && ia < a.order() && ib >= 0 && ib < b.order(),
                ErrorCode::invalid_argument,
                "contraction pair (" + std::to_string(ia) + "," + std::to_string(ib) +
                    ") out of range");
        require(!used_a[static_cast<std::size_t>(ia)] && !used_b[static_cast<std::size_t>(ib)],
                ErrorCode::invalid_argument,
                "contraction pair (" + std::to_string(ia) + "," + std::to_string(ib) +
                    ") repeats an axis");
        used_a[static_cast<std::size_t>(ia)] = 1;
        used_b[static_cast<std::size_t>(ib)] = 1;
        require(a.extent(ia) == b.extent(ib), ErrorCode::shape_mismatch,
                "contraction pair (" + std::to_string(ia) + "," + std::to_string(ib) +
                    ") joins extents " + std::to_string(a.extent(ia)) + " and " +
                    std::to_string(b.extent(ib)));
    }

    std::vector<int> free_a, free_b, perm_a, perm_b;
    for (int i = 0; i < a.order(); ++i) {
        if (!used_a[static_cast<std::size_t>(i)]) free_a.push_back(i);
    }
    for (int i = 0; i < b.order(); ++i) {
        if (!used_b[static_cast<std::size_t>(i)]) free_b.push_back(i);
    }
    perm_a = free_a;
    perm_b.reserve(static_cast<std::size_t>(b.order()));
    for (const auto& [ia, ib] : pairs) perm_a.push_back(ia);
    for (const auto& [ia, ib] : pairs) perm_b.push_back(ib);
    perm_b.insert(perm_b.end(), free_b.begin(), free_b.end());

    DenseTensor ta = permute(a, perm_a);
    DenseTensor tb = permute(b, perm_b);

    std::int64_t rows = 1, cols = 1, inner = 1;
    std::vector<std::int64_t> out_shape;
    for (int i : free_a) {
        rows *= a.extent(i);
        out_shape.push_back(a.extent(i));
    }
    for (const auto& [ia, ib] : pairs) inner *= a.extent(ia);
    for (int i : free_b) {
        cols *= b.extent(i);
        out_shape.push_back(b.extent(i));
    }

    DenseTensor out(out_shape);
    Eigen::Map<const RowMatrix> ma(ta.data().data(), rows, inner);
    Eigen::Map<const RowMatrix> mb(tb.data().data(), inner, cols);
    Eigen::Map<RowMatrix> mo(out.data().data(), rows, cols);
    mo.noalias() = ma * mb;
    return out;
}

Partition Partition::from_a_sites(std::vector<int> a, int n_sites, std::int64_t site_dim) {
    require(n_sites >= 2, ErrorCode::invalid_argument,
            "partition needs at least two sites");
    require(site_dim >= 1, ErrorCode::invalid_argument, "site dimension must be >= 1");
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    require(!a.empty(), ErrorCode::invalid_argument, "partition side A is empty");
    require(a.front() >= 0 && a.back() < n_sites, ErrorCode::invalid_argument,
            "partition site out of range");
    Partition p;
    p.site_dim = site_dim;
    p.a_sites = std::move(a);
    std::size_t next = 0;
    for (int s = 0; s < n_sites; ++s) {
        if (next < p.a_sites.size() && p.a_sites[next] == s) {
            ++next;
        } else {
            p.b_sites.push_back(s);
        }
    }
    require(!p.b_sites.empty(), ErrorCode::invalid_argument, "partition side B is empty");
    return p;
}

Partition Partition::suffix(int a_size, int n_sites, std::int64_t site_dim) {
    require(a_size >= 1 && a_size < n_sites, ErrorCode::invalid_argument,
            "suffix size must be in [1, n_sites)");
    std::vector<int> a;
    for (int s = n_sites - a_size; s < n_sites; ++s) a.push_back(s);
    return from_a_sites(std::move(a), n_sites, site_dim);
}

Partition Partition::prefix(int a_size, int n_sites, std::int64_t site_dim) {
    require(a_size >= 1 && a_size < n_sites, ErrorCode::invalid_argument,
            "prefix size must be in [1, n_sites)");
    std::vector<int> a;
    for (int s = 0; s < a_size; ++s) a.push_back(s);
    return from_a_sites(std::move(a), n_sites, site_dim);
}

namespace {

void check_partition_matches(const DenseTensor& t, const Partition& p) {
    require(t.order() == p.n_sites(), ErrorCode::shape_mismatch,
            "partition covers " + std::to_string(p.n_sites()) +
                " sites but tensor has order " + std::to_string(t.order()));
    for (int i = 0; i < t.order(); ++i) {
        require(t.extent(i) == p.site_dim, ErrorCode::shape_mismatch,
                "tensor extent on axis " + std::to_string(i) + " is " +
                    std::to_string(t.extent(i)) + ", expected site dimension " +
                    std::to_string(p.site_dim) + "; shape " + shape_string(t.shape()));
    }
}

}  // namespace

DenseTensor matricize(const DenseTensor& t, const Partition& p) {
    check_partition_matches(t, p);
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(t.order()));
    perm.insert(perm.end(), p.a_sites.begin(), p.a_sites.end());
    perm.insert(perm.end(), p.b_sites.begin(), p.b_sites.end());
    DenseTensor moved = permute(t, perm);
    std::int64_t rows = 1, cols = 1;
    for (std::size_t i = 0; i < p.a_sites.size(); ++i) rows *= p.site_dim;
    for (std::size_t i = 0; i < p.b_sites.size(); ++i) cols *= p.site_dim;
    return DenseTensor({rows, cols}, std::move(moved.data()));
}

DenseTensor dematricize(const DenseTensor& matrix, const Partition& p) {
    require(matrix.order() == 2, ErrorCode::invalid_argument,
            "dematricize expects an order-2 tensor");
    const int n = p.n_sites();
    std::vector<std::int64_t> merged_shape(static_cast<std::size_t>(n), p.site_dim);
    std::int64_t expect = 1;
    for (int i = 0; i < n; ++i) expect *= p.site_dim;
    require(matrix.size() == expect, ErrorCode::shape_mismatch,
            "matrix size does not match site_dim^n_sites");
    DenseTensor merged(merged_shape, std::vector<double>(matrix.data()));
    // merged axis order is (a_sites..., b_sites...); invert back to site order.
    std::vector<int> inverse(static_cast<std::size_t>(n));
    int pos = 0;
    for (int s : p.a_sites) inverse[static_cast<std::size_t>(s)] = pos++;
    for (int s : p.b_sites) inverse[static_cast<std::size_t>(s)] = pos++;
    return permute(merged, inverse);
}

std::vector<double> singular_values(const DenseTensor& matrix) {
    require(matrix.order() == 2, ErrorCode::invalid_argument,
            "singular_values expects an order-2 tensor");
    Eigen::Map<const RowMatrix> m(matrix.data().data(), matrix.extent(0), matrix.extent(1));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    return std::vector<double>(sv.data(), sv.data() + sv.size());
}

double entanglement_entropy(const DenseTensor& t, const Partition& p) {
    require(!t.is_zero(), ErrorCode::invalid_argument,
            "entanglement entropy of the zero tensor is undefined");
    const auto sv = singular_values(matricize(t, p));
    double total = 0.0;
    double max_weight = 0.0;
    std::vector<double> weights;
    weights.reserve(sv.size());
    for (double s : sv) {
        const double w = s * s;
        weights.push_back(w);
        total += w;
        max_weight = std::max(max_weight, w);
    }
    const double cutoff = std::numeric_limits<double>::epsilon() * max_weight;
    double entropy = 0.0;
    for (double w : weights) {
        if (w <= cutoff) continue;
        const double lambda = w / total;
        entropy -= lambda * std::log(lambda);
    }
    return std::max(entropy, 0.0);
}

std::int64_t schmidt_rank(const DenseTensor& t, const Partition& p, double rel_tol) {
    require(rel_tol > 0.0 && rel_tol < 1.0, ErrorCode::invalid_argument,
            "rank tolerance must lie in (0,1)");
    const auto sv = singular_values(matricize(t, p));
    if (sv.empty() || sv.front() == 0.0) return 0;
    const double cutoff = rel_tol * sv.front();
    std::int64_t rank = 0;
    for (double s : sv) {
        if (s > cutoff) ++rank;
    }
    return rank;
}

double max_relative_deviation(const DenseTensor& a, const DenseTensor& b) {
    require(a.shape() == b.shape(), ErrorCode::shape_mismatch,
            "deviation requires equal shapes, got " + shape_string(a.shape()) + " vs " +
                shape_string(b.shape()));
    const double scale = std::max(a.max_abs(), b.max_abs());
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst / scale;
}

}  // namespace tnac
