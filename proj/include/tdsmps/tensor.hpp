#pragma once

// Dense multi-index tensors and the matrix factorizations used by the MPS code.
//
// Storage is row-major over the index list: the LAST index runs fastest, so the
// linear offset of (i0, i1, ..., in) is ((i0 * d1 + i1) * d2 + ...) * dn + in.
// Fusing a block of adjacent leading (or trailing) indices is therefore a pure
// bookkeeping change, and `matrix(split)` maps the same memory as a row-major
// matrix whose rows fuse indices [0, split) and whose columns fuse the rest.
//
// Everything is templated on the scalar. The physics code instantiates with
// `double` (all Hamiltonians here are real symmetric); `std::complex<double>`
// compiles through the same paths and is exercised by the unit tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tdsmps/errors.hpp"

namespace tdsmps {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

inline constexpr Index unlimited_rank = std::numeric_limits<Index>::max();

namespace detail {

inline Index extent_product(std::span<const Index> dims) {
    Index n = 1;
    for (Index d : dims) {
        if (d <= 0) {
            throw DimensionError("tensor extents must be positive");
        }
        n *= d;
    }
    return n;
}

inline std::string format_dims(std::span<const Index> dims) {
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        s += (i ? "," : "") + std::to_string(dims[i]);
    }
    return s + ")";
}

} // namespace detail

template <typename Scalar>
class DenseTensor {
public:
    using scalar_type = Scalar;
    using real_type = RealOf<Scalar>;
    using dims_type = std::vector<Index>;
    using vector_type = Vector<Scalar>;
    using matrix_type = RowMatrix<Scalar>;

    DenseTensor() = default;

    explicit DenseTensor(dims_type dims)
        : dims_(std::move(dims)), data_(vector_type::Zero(detail::extent_product(dims_))) {}

    DenseTensor(dims_type dims, vector_type data) : dims_(std::move(dims)), data_(std::move(data)) {
        if (detail::extent_product(dims_) != data_.size()) {
            throw DimensionError("tensor data size " + std::to_string(data_.size()) +
                                 " does not match extents " + detail::format_dims(dims_));
        }
    }

    /// Copies a matrix into a tensor whose leading `split` extents fuse into the rows.
    template <typename Derived>
    static DenseTensor from_matrix(const Eigen::MatrixBase<Derived>& m, dims_type dims) {
        DenseTensor t(std::move(dims));
        const Index rows = m.rows();
        const Index cols = m.cols();
        if (rows * cols != t.size()) {
            throw DimensionError("matrix of size " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 " cannot be reshaped to " + detail::format_dims(t.dims_));
        }
        Eigen::Map<matrix_type>(t.data_.data(), rows, cols) = m;
        return t;
    }

    [[nodiscard]] Index rank() const noexcept { return static_cast<Index>(dims_.size()); }
    [[nodiscard]] Index dim(Index axis) const { return dims_.at(static_cast<std::size_t>(axis)); }
    [[nodiscard]] const dims_type& dims() const noexcept { return dims_; }
    [[nodiscard]] Index size() const noexcept { return data_.size(); }

    [[nodiscard]] vector_type& data() noexcept { return data_; }
    [[nodiscard]] const vector_type& data() const noexcept { return data_; }

    [[nodiscard]] Index offset(std::span<const Index> idx) const {
        if (static_cast<Index>(idx.size()) != rank()) {
            throw DimensionError("index arity does not match tensor rank");
        }
        Index off = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= dims_[k]) {
                throw RangeError("tensor index out of range on axis " + std::to_string(k));
            }
            off = off * dims_[k] + idx[k];
        }
        return off;
    }

    Scalar& operator()(std::initializer_list<Index> idx) { return data_[offset({idx.begin(), idx.size()})]; }
    const Scalar& operator()(std::initializer_list<Index> idx) const {
        return data_[offset({idx.begin(), idx.size()})];
    }

    /// Rows fuse axes [0, split), columns fuse axes [split, rank).
    [[nodiscard]] Eigen::Map<matrix_type> matrix(Index split) {
        auto [r, c] = matrix_shape(split);
        return Eigen::Map<matrix_type>(data_.data(), r, c);
    }
    [[nodiscard]] Eigen::Map<const matrix_type> matrix(Index split) const {
        auto [r, c] = matrix_shape(split);
        return Eigen::Map<const matrix_type>(data_.data(), r, c);
    }

    void reshape(dims_type dims) {
        if (detail::extent_product(dims) != size()) {
            throw DimensionError("cannot reshape " + detail::format_dims(dims_) + " to " +
                                 detail::format_dims(dims));
        }
        dims_ = std::move(dims);
    }

    [[nodiscard]] DenseTensor reshaped(dims_type dims) const {
        DenseTensor t = *this;
        t.reshape(std::move(dims));
        return t;
    }

    [[nodiscard]] real_type norm() const { return data_.norm(); }

    DenseTensor& operator*=(Scalar s) {
        data_ *= s;
        return *this;
    }

    friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
        return a.dims_ == b.dims_ && a.data_ == b.data_;
    }

private:
    [[nodiscard]] std::pair<Index, Index> matrix_shape(Index split) const {
        if (split < 0 || split > rank()) {
            throw DimensionError("matrix split position outside tensor rank");
        }
        Index rows = 1;
        for (Index k = 0; k < split; ++k) {
            rows *= dims_[static_cast<std::size_t>(k)];
        }
        return {rows, rows == 0 ? 0 : size() / rows};
    }

    dims_type dims_;
    vector_type data_;
};

/// Returns t with axes reordered so that output axis k is input axis perm[k].
template <typename Scalar>
DenseTensor<Scalar> permute(const DenseTensor<Scalar>& t, std::span<const Index> perm) {
    const Index n = t.rank();
    if (static_cast<Index>(perm.size()) != n) {
        throw DimensionError("permutation length does not match tensor rank");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Index p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]) {
            throw DimensionError("invalid axis permutation");
        }
        seen[static_cast<std::size_t>(p)] = true;
    }
    std::vector<Index> in_stride(static_cast<std::size_t>(n), 1);
    for (Index k = n - 2; k >= 0; --k) {
        in_stride[k] = in_stride[k + 1] * t.dims()[k + 1];
    }
    std::vector<Index> out_dims(static_cast<std::size_t>(n));
    std::vector<Index> stride(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        out_dims[k] = t.dims()[perm[k]];
        stride[k] = in_stride[perm[k]];
    }
    DenseTensor<Scalar> out(out_dims);
    if (n == 0) {
        out.data()[0] = t.data()[0];
        return out;
    }
    // Odometer over the output multi-index; the innermost axis is a strided copy.
    std::vector<Index> idx(static_cast<std::size_t>(n), 0);
    const Index inner = out_dims[n - 1];
    const Index inner_stride = stride[n - 1];
    const Scalar* src = t.data().data();
    Scalar* dst = out.data().data();
    Index src_off = 0;
    for (Index written = 0; written < out.size(); written += inner) {
        for (Index j = 0; j < inner; ++j) {
            dst[written + j] = src[src_off + j * inner_stride];
        }
        for (Index k = n - 2; k >= 0; --k) {
            src_off += stride[k];
            if (++idx[k] < out_dims[k]) {
                break;
            }
            src_off -= stride[k] * out_dims[k];
            idx[k] = 0;
        }
    }
    return out;
}

template <typename Scalar>
DenseTensor<Scalar> permute(const DenseTensor<Scalar>& t, std::initializer_list<Index> perm) {
    return permute(t, std::span<const Index>(perm.begin(), perm.size()));
}

using AxisPair = std::pair<Index, Index>;

/// Contracts a and b over the paired axes. Free axes of a come first, then free
/// axes of b, each in their original order. No pairs gives the outer product.
template <typename Scalar>
DenseTensor<Scalar> contract(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b,
                             std::span<const AxisPair> pairs) {
    std::vector<bool> a_used(static_cast<std::size_t>(a.rank()), false);
    std::vector<bool> b_used(static_cast<std::size_t>(b.rank()), false);
    std::vector<Index> a_perm;
    std::vector<Index> b_perm;
    Index inner = 1;
    for (auto [ia, ib] : pairs) {
        if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank() || a_used[ia] || b_used[ib]) {
            throw DimensionError("invalid contraction axis pair");
        }
        if (a.dim(ia) != b.dim(ib)) {
            throw DimensionError("contraction extent mismatch: " + std::to_string(a.dim(ia)) + " vs " +
                                 std::to_string(b.dim(ib)));
        }
        a_used[ia] = b_used[ib] = true;
        inner *= a.dim(ia);
    }
    std::vector<Index> out_dims;
    for (Index k = 0; k < a.rank(); ++k) {
        if (!a_used[k]) {
            a_perm.push_back(k);
            out_dims.push_back(a.dim(k));
        }
    }
    for (auto [ia, ib] : pairs) {
        a_perm.push_back(ia);
        b_perm.push_back(ib);
    }
    for (Index k = 0; k < b.rank(); ++k) {
        if (!b_used[k]) {
            b_perm.push_back(k);
            out_dims.push_back(b.dim(k));
        }
    }
    const auto ap = permute(a, a_perm);
    const auto bp = permute(b, b_perm);
    const Index rows = a.size() / inner;
    const Index cols = b.size() / inner;
    RowMatrix<Scalar> prod = Eigen::Map<const RowMatrix<Scalar>>(ap.data().data(), rows, inner) *
                             Eigen::Map<const RowMatrix<Scalar>>(bp.data().data(), inner, cols);
    if (out_dims.empty()) {
        return DenseTensor<Scalar>({1}, Eigen::Map<Vector<Scalar>>(prod.data(), 1));
    }
    return DenseTensor<Scalar>::from_matrix(prod, std::move(out_dims));
}

template <typename Scalar>
DenseTensor<Scalar> contract(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b,
                             std::initializer_list<AxisPair> pairs) {
    return contract(a, b, std::span<const AxisPair>(pairs.begin(), pairs.size()));
}

/// Merges axes [first, first + count) into one axis. Data is untouched.
template <typename Scalar>
DenseTensor<Scalar> fuse(DenseTensor<Scalar> t, Index first, Index count) {
    if (first < 0 || count < 1 || first + count > t.rank()) {
        throw DimensionError("fuse range outside tensor rank");
    }
    std::vector<Index> dims;
    Index merged = 1;
    for (Index k = 0; k < t.rank(); ++k) {
        if (k >= first && k < first + count) {
            merged *= t.dim(k);
            if (k == first + count - 1) {
                dims.push_back(merged);
            }
        } else {
            dims.push_back(t.dim(k));
        }
    }
    t.reshape(std::move(dims));
    return t;
}

/// Splits one axis into the given extents (inverse of fuse).
template <typename Scalar>
DenseTensor<Scalar> split(DenseTensor<Scalar> t, Index axis, std::span<const Index> extents) {
    if (axis < 0 || axis >= t.rank()) {
        throw DimensionError("split axis outside tensor rank");
    }
    if (detail::extent_product(extents) != t.dim(axis)) {
        throw DimensionError("split extents do not multiply to the axis extent");
    }
    std::vector<Index> dims;
    for (Index k = 0; k < t.rank(); ++k) {
        if (k == axis) {
            dims.insert(dims.end(), extents.begin(), extents.end());
        } else {
            dims.push_back(t.dim(k));
        }
    }
    t.reshape(std::move(dims));
    return t;
}

// ---------------------------------------------------------------------------
// Truncated SVD
// ---------------------------------------------------------------------------

struct TruncationPolicy {
    Index max_rank = unlimited_rank;
    /// Minimum kept squared singular value relative to the total squared weight.
    double rel_weight_cutoff = 0.0;
};

/// m ~= left * diag(singular_values) * right, with orthonormal columns of left
/// and orthonormal rows of right.
template <typename Scalar>
struct MatrixSvd {
    RowMatrix<Scalar> left;
    Vector<RealOf<Scalar>> singular_values;
    RowMatrix<Scalar> right;
    /// Sum of squared dropped singular values, before any renormalization.
    RealOf<Scalar> discarded_weight = 0;
    /// Set when the primary SVD failed and the Gram-matrix route was used.
    bool used_gram_fallback = false;
    /// Set when the divide-and-conquer result failed validation.
    bool used_jacobi_fallback = false;
};

namespace detail {

template <typename Scalar>
void gram_svd(const RowMatrix<Scalar>& m, MatrixSvd<Scalar>& out) {
    using Real = RealOf<Scalar>;
    const bool wide = m.rows() <= m.cols();
    RowMatrix<Scalar> gram = wide ? RowMatrix<Scalar>(m * m.adjoint()) : RowMatrix<Scalar>(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<RowMatrix<Scalar>> es(gram);
    if (es.info() != Eigen::Success) {
        throw NumericalError("SVD and Gram eigen-decomposition both failed");
    }
    const Index n = gram.rows();
    Index nonzero = 0;
    Vector<Real> s(n);
    for (Index k = 0; k < n; ++k) {
        const Real lambda = es.eigenvalues()[n - 1 - k];
        s[k] = lambda > 0 ? std::sqrt(lambda) : Real(0);
        if (s[k] > 0) {
            ++nonzero;
        }
    }
    RowMatrix<Scalar> vecs = es.eigenvectors().rowwise().reverse().leftCols(nonzero);
    out.singular_values = s.head(nonzero);
    const auto inv = out.singular_values.cwiseInverse().template cast<Scalar>().asDiagonal();
    if (wide) {
        out.left = vecs;
        out.right = inv * (vecs.adjoint() * m);
    } else {
        out.right = vecs.adjoint();
        out.left = (m * vecs) * inv;
    }
    out.used_gram_fallback = true;
}

template <typename Scalar>
Index truncate_factors(MatrixSvd<Scalar>& out, const TruncationPolicy& policy) {
    using Real = RealOf<Scalar>;
    const Vector<Real> weights = out.singular_values.array().square();
    const Real total = weights.sum();
    Index keep = 0;
    while (keep < weights.size() && keep < policy.max_rank &&
           weights[keep] >= static_cast<Real>(policy.rel_weight_cutoff) * total) {
        ++keep;
    }
    out.discarded_weight = weights.tail(weights.size() - keep).sum();
    if (keep < out.singular_values.size()) {
        out.left = out.left.leftCols(keep).eval();
        out.right = out.right.topRows(keep).eval();
        out.singular_values = out.singular_values.head(keep).eval();
    }
    return keep;
}

// Orthonormal kept factors with m V^H = U S.
template <typename Scalar>
bool factors_consistent(const RowMatrix<Scalar>& m, const MatrixSvd<Scalar>& f, Index keep) {
    using Real = RealOf<Scalar>;
    const Real tol = Real(1e-11);
    const RowMatrix<Scalar> eye = RowMatrix<Scalar>::Identity(keep, keep);
    if ((f.left.adjoint() * f.left - eye).cwiseAbs().maxCoeff() > tol ||
        (f.right * f.right.adjoint() - eye).cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    const RowMatrix<Scalar> residual = m * f.right.adjoint() - f.left * f.singular_values.template cast<Scalar>().asDiagonal();
    return residual.norm() <= tol * m.norm();
}

} // namespace detail

/// Truncated SVD of a matrix.
///
/// Keeps the leading r singular values where r is the number of normalized
/// squared singular values >= rel_weight_cutoff, capped at max_rank. The cut is
/// made strictly at r even inside a degenerate multiplet.
template <typename Derived>
MatrixSvd<typename Derived::Scalar> svd_truncate(const Eigen::MatrixBase<Derived>& input,
                                                const TruncationPolicy& policy = {}) {
    using Scalar = typename Derived::Scalar;
    using Real = RealOf<Scalar>;
    if (policy.max_rank < 1) {
        throw ParameterError("max_rank must be positive");
    }
    if (!(policy.rel_weight_cutoff >= 0.0 && policy.rel_weight_cutoff < 1.0)) {
        throw ParameterError("rel_weight_cutoff must lie in [0, 1)");
    }
    const RowMatrix<Scalar> m = input;
    if (!m.allFinite()) {
        throw NumericalError("svd_truncate: non-finite matrix entries");
    }
    MatrixSvd<Scalar> out;
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() == Real(0)) {
        out.left.resize(m.rows(), 0);
        out.right.resize(0, m.cols());
        out.singular_values.resize(0);
        return out;
    }

    Eigen::BDCSVD<RowMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() == Eigen::Success && svd.singularValues().allFinite() && svd.matrixU().allFinite() &&
        svd.matrixV().allFinite()) {
        out.left = svd.matrixU();
        out.singular_values = svd.singularValues();
        out.right = svd.matrixV().adjoint();
    } else {
        detail::gram_svd(m, out);
    }
    const Index keep = detail::truncate_factors(out, policy);
    // Divide-and-conquer occasionally loses orthogonality on rank-deficient blocks.
    if (!out.used_gram_fallback && !detail::factors_consistent(m, out, keep)) {
        Eigen::JacobiSVD<RowMatrix<Scalar>> jacobi(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.left = jacobi.matrixU();
        out.singular_values = jacobi.singularValues();
        out.right = jacobi.matrixV().adjoint();
        out.used_jacobi_fallback = true;
        detail::truncate_factors(out, policy);
    }
    return out;
}

/// Tensor-level SVD result; left has dims (rows, r), right has dims (r, cols).
template <typename Scalar>
struct SvdResult {
    DenseTensor<Scalar> left_isometry;
    std::vector<RealOf<Scalar>> singular_values;
    DenseTensor<Scalar> right_isometry;
    RealOf<Scalar> discarded_weight = 0;
};

/// SVD of a rank-2 tensor (two fused indices) under the given truncation policy.
template <typename Scalar>
SvdResult<Scalar> svd_truncate(const DenseTensor<Scalar>& m, const TruncationPolicy& policy = {}) {
    if (m.rank() != 2) {
        throw DimensionError("svd_truncate expects a tensor with exactly two (fused) indices");
    }
    auto f = svd_truncate(m.matrix(1), policy);
    const Index r = f.singular_values.size();
    SvdResult<Scalar> out;
    if (r == 0) {
        return out;
    }
    out.left_isometry = DenseTensor<Scalar>::from_matrix(f.left, {m.dim(0), r});
    out.right_isometry = DenseTensor<Scalar>::from_matrix(f.right, {r, m.dim(1)});
    out.singular_values.assign(f.singular_values.data(), f.singular_values.data() + r);
    out.discarded_weight = f.discarded_weight;
    return out;
}

} // namespace tdsmps
