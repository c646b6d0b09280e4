#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/error.hpp"

namespace tnac {

// Dense order-k real tensor, row-major flat storage. Order 0 is a scalar
// (shape empty, one data element). Immutable by convention once built: all
// operations below return fresh tensors.
class DenseTensor {
  public:
    DenseTensor() : shape_{}, data_(1, 0.0) {}

    explicit DenseTensor(std::vector<std::int64_t> shape)
        : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}

    DenseTensor(std::vector<std::int64_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        require(data_.size() == static_cast<std::size_t>(checked_size(shape_)),
                ErrorCode::shape_mismatch,
                "tensor data length does not match product of shape extents");
    }

    static DenseTensor scalar(double value);

    // 1 on the super-diagonal, 0 otherwise.
    static DenseTensor delta(int order, std::int64_t dim);

    // One-hot vector of length `dim` selecting `index` (0-based).
    static DenseTensor basis_vector(std::int64_t dim, std::int64_t index);

    int order() const { return static_cast<int>(shape_.size()); }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::int64_t extent(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double operator[](std::int64_t flat) const { return data_[static_cast<std::size_t>(flat)]; }
    double& operator[](std::int64_t flat) { return data_[static_cast<std::size_t>(flat)]; }

    std::int64_t flat_index(std::span<const std::int64_t> idx) const;
    double at(std::span<const std::int64_t> idx) const { return data_[static_cast<std::size_t>(flat_index(idx))]; }
    double& at(std::span<const std::int64_t> idx) { return data_[static_cast<std::size_t>(flat_index(idx))]; }
    double at(std::initializer_list<std::int64_t> idx) const {
        return at(std::span<const std::int64_t>(idx.begin(), idx.size()));
    }
    double& at(std::initializer_list<std::int64_t> idx) {
        return at(std::span<const std::int64_t>(idx.begin(), idx.size()));
    }

    double frobenius_norm() const;
    double max_abs() const;
    bool is_zero() const { return max_abs() == 0.0; }

    // Row-major strides of this shape.
    std::vector<std::int64_t> strides() const;

  private:
    static std::int64_t checked_size(const std::vector<std::int64_t>& shape);

    std::vector<std::int64_t> shape_;
    std::vector<double> data_;
};

// Axis pair (axis of first tensor, axis of second tensor) to be summed over.
using ContractionPair = std::pair<int, int>;

// Pairwise contraction. Free axes of `a` precede free axes of `b` in the
// result, each keeping their original relative order.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const ContractionPair> pairs);

// Reorders axes: result axis i is input axis perm[i].
DenseTensor permute(const DenseTensor& t, std::span<const int> perm);

// Bipartition of site indices {0..n-1} into A and its complement B, with the
// common per-site dimension. Both sides non-empty.
struct Partition {
    std::vector<int> a_sites;  // sorted, 0-based
    std::vector<int> b_sites;  // sorted complement
    std::int64_t site_dim = 0;

    int n_sites() const { return static_cast<int>(a_sites.size() + b_sites.size()); }

    static Partition from_a_sites(std::vector<int> a, int n_sites, std::int64_t site_dim);
    // A = {n - a_size .. n-1}.
    static Partition suffix(int a_size, int n_sites, std::int64_t site_dim);
    // A = {0 .. a_size-1}.
    static Partition prefix(int a_size, int n_sites, std::int64_t site_dim);
};

// Reshapes an order-N tensor (all extents == p.site_dim) into the
// M^|A| x M^|B| matrix whose row/column indices enumerate A-/B-site
// configurations lexicographically (sites in ascending order).
DenseTensor matricize(const DenseTensor& t, const Partition& p);

// Exact inverse of matricize for the same partition.
DenseTensor dematricize(const DenseTensor& matrix, const Partition& p);

// Singular values of an order-2 tensor, descending.
std::vector<double> singular_values(const DenseTensor& matrix);

// Von Neumann entropy (nats) across the partition after normalizing the
// tensor to unit Frobenius norm. Spectral weights below
// machine-epsilon * max weight contribute zero. Rejects the zero tensor.
double entanglement_entropy(const DenseTensor& t, const Partition& p);

inline constexpr double kDefaultRankTol = 1e-9;

// Number of singular values of the matricization above rel_tol * sigma_max.
// Zero only for the zero tensor.
std::int64_t schmidt_rank(const DenseTensor& t, const Partition& p,
                          double rel_tol = kDefaultRankTol);

// max_i |a_i - b_i| scaled by the largest entry magnitude of either tensor
// (0 if both tensors are identically zero). Shapes must match.
double max_relative_deviation(const DenseTensor& a, const DenseTensor& b);

}  // namespace tnac
