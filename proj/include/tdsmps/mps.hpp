#pragma once

// Matrix-product purification of a thermal state.
//
// Each site tensor has dims (left bond, d*d, right bond). The middle index fuses
// the physical leg sigma and its ancilla partner sigma-bar with sigma as the
// major index: p = sigma * d + sigma_bar. Dense vectors produced by `to_dense`
// (and consumed by `from_dense`) use the same site-local pairing with site 1 as
// the most significant position, i.e. the basis is
//     |sigma_1 sigmabar_1, sigma_2 sigmabar_2, ..., sigma_L sigmabar_L>.
//
// Bonds are numbered 1..L-1; bond l separates (0-based) sites l-1 and l.
// The canonical center, when known, is a 0-based site c: sites left of c are
// left-orthonormal, sites right of c are right-orthonormal.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tdsmps/errors.hpp"
#include "tdsmps/spectrum.hpp"
#include "tdsmps/tensor.hpp"

namespace tdsmps {

template <typename Scalar>
class PurificationMps {
public:
    using scalar_type = Scalar;
    using tensor_type = DenseTensor<Scalar>;

    PurificationMps() = default;

    PurificationMps(Index local_dim, std::vector<tensor_type> sites)
        : local_dim_(local_dim), sites_(std::move(sites)),
          spectra_(sites_.empty() ? 0 : sites_.size() - 1) {
        validate();
        for (std::size_t b = 0; b < spectra_.size(); ++b) {
            spectra_[b].bond = static_cast<long>(b + 1);
        }
    }

    [[nodiscard]] Index length() const noexcept { return static_cast<Index>(sites_.size()); }
    [[nodiscard]] Index local_dim() const noexcept { return local_dim_; }
    [[nodiscard]] Index physical_dim() const noexcept { return local_dim_ * local_dim_; }

    [[nodiscard]] const std::vector<tensor_type>& sites() const noexcept { return sites_; }
    [[nodiscard]] tensor_type& site(Index i) { return sites_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] const tensor_type& site(Index i) const { return sites_.at(static_cast<std::size_t>(i)); }

    /// Extent of bond l (1-based).
    [[nodiscard]] Index bond_dimension(Index bond) const {
        check_bond(bond);
        return sites_[static_cast<std::size_t>(bond - 1)].dim(2);
    }
    [[nodiscard]] Index max_bond_dimension() const {
        Index m = 1;
        for (Index b = 1; b < length(); ++b) {
            m = std::max(m, bond_dimension(b));
        }
        return m;
    }

    /// Last recorded spectrum of bond l. Exact only right after an operation
    /// that recorded it (canonicalize, truncate_to, a gate on that bond).
    [[nodiscard]] const BondSpectrum& bond_spectrum(Index bond) const {
        check_bond(bond);
        return spectra_[static_cast<std::size_t>(bond - 1)];
    }
    void set_bond_spectrum(Index bond, BondSpectrum s) {
        check_bond(bond);
        s.bond = static_cast<long>(bond);
        spectra_[static_cast<std::size_t>(bond - 1)] = std::move(s);
    }
    [[nodiscard]] const std::vector<BondSpectrum>& bond_spectra() const noexcept { return spectra_; }

    /// Accumulated log of every norm divided out of the state.
    [[nodiscard]] double log_norm() const noexcept { return log_norm_; }
    void add_log_norm(double x) noexcept { log_norm_ += x; }
    void set_log_norm(double x) noexcept { log_norm_ = x; }

    [[nodiscard]] std::optional<Index> center() const noexcept { return center_; }
    void set_center(std::optional<Index> c) noexcept { center_ = c; }

    void check_bond(Index bond) const {
        if (bond < 1 || bond >= length()) {
            throw RangeError("bond " + std::to_string(bond) + " outside 1.." + std::to_string(length() - 1));
        }
    }
    void check_site(Index s) const {
        if (s < 0 || s >= length()) {
            throw RangeError("site " + std::to_string(s) + " outside chain of length " +
                             std::to_string(length()));
        }
    }

    void validate() const {
        if (local_dim_ < 1) {
            throw ParameterError("local dimension must be positive");
        }
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            const auto& t = sites_[i];
            if (t.rank() != 3 || t.dim(1) != physical_dim()) {
                throw DimensionError("site tensor " + std::to_string(i) + " must have dims (Dl, d*d, Dr)");
            }
            if (i > 0 && sites_[i - 1].dim(2) != t.dim(0)) {
                throw DimensionError("bond extent mismatch between sites " + std::to_string(i - 1) + " and " +
                                     std::to_string(i));
            }
        }
        if (!sites_.empty() && (sites_.front().dim(0) != 1 || sites_.back().dim(2) != 1)) {
            throw DimensionError("boundary bonds must have extent 1");
        }
    }

private:
    Index local_dim_ = 0;
    std::vector<tensor_type> sites_;
    std::vector<BondSpectrum> spectra_;
    double log_norm_ = 0;
    std::optional<Index> center_;
};

/// The normalized infinite-temperature purification: each site holds
/// delta(sigma, sigma_bar) / sqrt(d) with bond dimension one.
template <typename Scalar = double>
PurificationMps<Scalar> build_infinite_temperature_tds(Index local_dim, Index length) {
    if (local_dim < 2 || length < 2) {
        throw ParameterError("infinite-temperature state needs d >= 2 and L >= 2");
    }
    const Index p = local_dim * local_dim;
    DenseTensor<Scalar> t({1, p, 1});
    const Scalar amp = Scalar(1) / std::sqrt(RealOf<Scalar>(local_dim));
    for (Index s = 0; s < local_dim; ++s) {
        t({0, s * local_dim + s, 0}) = amp;
    }
    PurificationMps<Scalar> mps(local_dim, std::vector<DenseTensor<Scalar>>(static_cast<std::size_t>(length), t));
    for (Index b = 1; b < length; ++b) {
        mps.set_bond_spectrum(b, BondSpectrum{{1.0}, static_cast<long>(b)});
    }
    mps.set_center(0);
    return mps;
}

namespace detail {

template <typename Scalar>
void check_finite(const PurificationMps<Scalar>& s) {
    for (const auto& t : s.sites()) {
        if (!t.data().allFinite()) {
            throw NumericalError("non-finite entries in MPS site tensor");
        }
    }
}

template <typename Scalar>
RowMatrix<Scalar> thin_q(const Eigen::HouseholderQR<RowMatrix<Scalar>>& qr, Index rows, Index k) {
    RowMatrix<Scalar> q = RowMatrix<Scalar>::Identity(rows, k);
    q.applyOnTheLeft(qr.householderQ());
    return q;
}

template <typename Scalar>
BondSpectrum spectrum_from_singular_values(const Vector<RealOf<Scalar>>& s, Index bond) {
    std::vector<double> w(static_cast<std::size_t>(s.size()));
    for (Index k = 0; k < s.size(); ++k) {
        w[static_cast<std::size_t>(k)] = static_cast<double>(s[k] * s[k]);
    }
    return make_spectrum(std::move(w), static_cast<long>(bond));
}

// One gauge step moving the center from site c to c+1.
template <typename Scalar>
void shift_center_right(PurificationMps<Scalar>& st, Index c, bool record) {
    auto& a = st.site(c);
    auto& b = st.site(c + 1);
    const Index dl = a.dim(0);
    const Index p = a.dim(1);
    const auto m = a.matrix(2);
    RowMatrix<Scalar> left;
    RowMatrix<Scalar> carry;
    if (record) {
        auto f = svd_truncate(m);
        st.set_bond_spectrum(c + 1, spectrum_from_singular_values<Scalar>(f.singular_values, c + 1));
        left = std::move(f.left);
        carry = f.singular_values.template cast<Scalar>().asDiagonal() * f.right;
    } else {
        Eigen::HouseholderQR<RowMatrix<Scalar>> qr(m);
        const Index k = std::min(m.rows(), m.cols());
        left = thin_q<Scalar>(qr, m.rows(), k);
        carry = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    }
    const Index k = left.cols();
    RowMatrix<Scalar> next = carry * b.matrix(1);
    a = DenseTensor<Scalar>::from_matrix(left, {dl, p, k});
    b = DenseTensor<Scalar>::from_matrix(next, {k, b.dim(1), b.dim(2)});
}

// One gauge step moving the center from site c to c-1.
template <typename Scalar>
void shift_center_left(PurificationMps<Scalar>& st, Index c, bool record) {
    auto& a = st.site(c - 1);
    auto& b = st.site(c);
    const Index p = b.dim(1);
    const Index dr = b.dim(2);
    const auto m = b.matrix(1);
    RowMatrix<Scalar> right;
    RowMatrix<Scalar> carry;
    if (record) {
        auto f = svd_truncate(m);
        st.set_bond_spectrum(c, spectrum_from_singular_values<Scalar>(f.singular_values, c));
        right = std::move(f.right);
        carry = f.left * f.singular_values.template cast<Scalar>().asDiagonal();
    } else {
        const RowMatrix<Scalar> mt = m.adjoint();
        Eigen::HouseholderQR<RowMatrix<Scalar>> qr(mt);
        const Index k = std::min(mt.rows(), mt.cols());
        right = thin_q<Scalar>(qr, mt.rows(), k).adjoint();
        carry = RowMatrix<Scalar>(qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>()).adjoint();
    }
    const Index k = right.rows();
    RowMatrix<Scalar> prev = a.matrix(2) * carry;
    b = DenseTensor<Scalar>::from_matrix(right, {k, p, dr});
    a = DenseTensor<Scalar>::from_matrix(prev, {a.dim(0), a.dim(1), k});
}

} // namespace detail

/// Divides the center tensor by its norm and records the log of that norm.
template <typename Scalar>
void normalize(PurificationMps<Scalar>& st) {
    if (!st.center()) {
        throw ParameterError("normalize requires a canonical center");
    }
    auto& t = st.site(*st.center());
    const auto n = t.norm();
    if (!(n > 0) || !std::isfinite(static_cast<double>(n))) {
        throw NumericalError("state norm is zero or non-finite");
    }
    t *= Scalar(1) / n;
    st.add_log_norm(std::log(static_cast<double>(n)));
}

/// Moves the canonical center to `target`. Establishes a canonical form first
/// when none is known. With record_spectra, every bond crossed gets its exact
/// Schmidt spectrum stored.
template <typename Scalar>
void move_center(PurificationMps<Scalar>& st, Index target, bool record_spectra = false) {
    st.check_site(target);
    detail::check_finite(st);
    if (!st.center()) {
        for (Index c = 0; c + 1 < st.length(); ++c) {
            detail::shift_center_right(st, c, false);
        }
        st.set_center(st.length() - 1);
    }
    Index c = *st.center();
    while (c < target) {
        detail::shift_center_right(st, c, record_spectra);
        ++c;
    }
    while (c > target) {
        detail::shift_center_left(st, c, record_spectra);
        --c;
    }
    st.set_center(c);
}

/// Brings the state into mixed-canonical form about bond `bond`: the center
/// sits at (1-based) site `bond`, every site to its right is right-orthonormal,
/// the state is normalized and all bond spectra are refreshed.
template <typename Scalar>
void canonicalize_in_place(PurificationMps<Scalar>& st, Index bond) {
    st.check_bond(bond);
    move_center(st, 0);
    normalize(st);
    move_center(st, st.length() - 1, true);
    move_center(st, bond - 1);
}

template <typename Scalar>
PurificationMps<Scalar> canonicalize(PurificationMps<Scalar> st, Index bond) {
    canonicalize_in_place(st, bond);
    return st;
}

/// Schmidt spectrum at bond l computed on a private copy.
template <typename Scalar>
BondSpectrum schmidt_spectrum(const PurificationMps<Scalar>& state, Index bond) {
    state.check_bond(bond);
    PurificationMps<Scalar> st = state;
    move_center(st, bond - 1);
    normalize(st);
    const auto f = svd_truncate(st.site(bond - 1).matrix(2));
    return detail::spectrum_from_singular_values<Scalar>(f.singular_values, bond);
}

/// Spectra at every bond, computed on a private copy in one sweep.
template <typename Scalar>
std::vector<BondSpectrum> all_schmidt_spectra(const PurificationMps<Scalar>& state) {
    PurificationMps<Scalar> st = state;
    move_center(st, 0);
    normalize(st);
    move_center(st, st.length() - 1, true);
    return st.bond_spectra();
}

template <typename Scalar>
struct TruncationOutcome {
    PurificationMps<Scalar> state;
    /// Discarded weight per bond (index l-1), measured on the normalized state
    /// before the retained spectrum is renormalized.
    std::vector<double> bond_errors;
};

/// One right-to-left sweep truncating every bond with the svd_truncate policy.
template <typename Scalar>
TruncationOutcome<Scalar> truncate_to(PurificationMps<Scalar> st, Index max_rank, double rel_weight_cutoff) {
    const TruncationPolicy policy{max_rank, rel_weight_cutoff};
    move_center(st, st.length() - 1);
    normalize(st);
    std::vector<double> errors(static_cast<std::size_t>(st.length() - 1), 0.0);
    for (Index c = st.length() - 1; c > 0; --c) {
        auto& a = st.site(c - 1);
        auto& b = st.site(c);
        const auto m = b.matrix(1);
        auto f = svd_truncate(m, policy);
        if (f.singular_values.size() == 0) {
            throw NumericalError("truncation removed the entire state");
        }
        const double total = static_cast<double>(f.singular_values.squaredNorm() + f.discarded_weight);
        const double kept = static_cast<double>(f.singular_values.squaredNorm());
        errors[static_cast<std::size_t>(c - 1)] = static_cast<double>(f.discarded_weight) / total;
        const Index k = f.singular_values.size();
        const auto scale = Scalar(1) / std::sqrt(RealOf<Scalar>(kept));
        RowMatrix<Scalar> prev = a.matrix(2) * (f.left * f.singular_values.template cast<Scalar>().asDiagonal()) * scale;
        b = DenseTensor<Scalar>::from_matrix(f.right, {k, b.dim(1), b.dim(2)});
        a = DenseTensor<Scalar>::from_matrix(prev, {a.dim(0), a.dim(1), k});
        st.set_bond_spectrum(c, detail::spectrum_from_singular_values<Scalar>(f.singular_values, c));
    }
    st.set_center(0);
    return {std::move(st), std::move(errors)};
}

inline constexpr Index default_dense_cap = Index(1) << 24;

/// Coefficient vector in the documented basis. The normalized state is returned
/// unless `unnormalized` is set, in which case exp(log_norm) is multiplied in.
template <typename Scalar>
Vector<Scalar> to_dense(const PurificationMps<Scalar>& st, bool unnormalized = false,
                        Index cap = default_dense_cap) {
    const Index p = st.physical_dim();
    double total = 1;
    for (Index i = 0; i < st.length(); ++i) {
        total *= static_cast<double>(p);
    }
    if (total > static_cast<double>(cap)) {
        throw SizeError("dense vector of " + std::to_string(total) + " scalars exceeds cap " + std::to_string(cap));
    }
    RowMatrix<Scalar> acc = st.site(0).matrix(2);
    for (Index i = 1; i < st.length(); ++i) {
        const auto& t = st.site(i);
        RowMatrix<Scalar> next = acc * t.matrix(1);
        acc = Eigen::Map<RowMatrix<Scalar>>(next.data(), next.size() / t.dim(2), t.dim(2));
    }
    Vector<Scalar> v = Eigen::Map<Vector<Scalar>>(acc.data(), acc.size());
    if (unnormalized) {
        v *= Scalar(std::exp(st.log_norm()));
    }
    return v;
}

/// Exact MPS of a dense vector through a left-to-right SVD cascade. The vector
/// is normalized and its norm goes into log_norm.
template <typename Derived>
PurificationMps<typename Derived::Scalar> from_dense(const Eigen::MatrixBase<Derived>& vec, Index local_dim,
                                                     Index length, const TruncationPolicy& policy = {}) {
    using Scalar = typename Derived::Scalar;
    const Index p = local_dim * local_dim;
    Index total = 1;
    for (Index i = 0; i < length; ++i) {
        total *= p;
    }
    if (vec.size() != total) {
        throw DimensionError("dense vector length does not match (d*d)^L");
    }
    const auto n = vec.norm();
    if (!(n > 0)) {
        throw NumericalError("cannot build an MPS from the zero vector");
    }
    Vector<Scalar> rest = vec / n;
    std::vector<DenseTensor<Scalar>> sites;
    std::vector<BondSpectrum> spectra;
    Index left = 1;
    for (Index i = 0; i + 1 < length; ++i) {
        const Index rows = left * p;
        const Eigen::Map<const RowMatrix<Scalar>> m(rest.data(), rows, rest.size() / rows);
        auto f = svd_truncate(m, policy);
        const Index k = f.singular_values.size();
        sites.push_back(DenseTensor<Scalar>::from_matrix(f.left, {left, p, k}));
        spectra.push_back(detail::spectrum_from_singular_values<Scalar>(f.singular_values, i + 1));
        RowMatrix<Scalar> r = f.singular_values.template cast<Scalar>().asDiagonal() * f.right;
        rest = Eigen::Map<Vector<Scalar>>(r.data(), r.size());
        left = k;
    }
    sites.push_back(DenseTensor<Scalar>({left, p, 1}, rest));
    PurificationMps<Scalar> st(local_dim, std::move(sites));
    for (auto& s : spectra) {
        st.set_bond_spectrum(s.bond, std::move(s));
    }
    st.set_center(length - 1);
    normalize(st);
    st.add_log_norm(std::log(static_cast<double>(n)));
    return st;
}

/// Applies `op` to the physical (sigma) legs of a block of `nsites` adjacent
/// sites, leaving the ancilla legs untouched. `theta` has dims
/// (Dl, d*d, ..., d*d, Dr); op is a d^n x d^n matrix in row-major (sigma_1 major)
/// order.
template <typename Scalar, typename Derived>
DenseTensor<Scalar> apply_physical(const DenseTensor<Scalar>& theta, const Eigen::MatrixBase<Derived>& op,
                                   Index local_dim, Index nsites) {
    const Index d = local_dim;
    const Index dl = theta.dim(0);
    const Index dr = theta.dim(theta.rank() - 1);
    Index opdim = 1;
    for (Index k = 0; k < nsites; ++k) {
        opdim *= d;
    }
    if (op.rows() != opdim || op.cols() != opdim) {
        throw DimensionError("operator dimension does not match d^n");
    }
    // (Dl, s1, sb1, ..., sn, sbn, Dr) -> (s1..sn, Dl, sb1..sbn, Dr)
    std::vector<Index> dims{dl};
    for (Index k = 0; k < nsites; ++k) {
        dims.push_back(d);
        dims.push_back(d);
    }
    dims.push_back(dr);
    const DenseTensor<Scalar> t = theta.reshaped(dims);
    std::vector<Index> perm;
    for (Index k = 0; k < nsites; ++k) {
        perm.push_back(1 + 2 * k);
    }
    perm.push_back(0);
    for (Index k = 0; k < nsites; ++k) {
        perm.push_back(2 + 2 * k);
    }
    perm.push_back(2 * nsites + 1);
    DenseTensor<Scalar> moved = permute(t, perm);
    auto m = moved.matrix(nsites);
    RowMatrix<Scalar> applied = op.template cast<Scalar>() * m;
    m = applied;
    std::vector<Index> inverse(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        inverse[static_cast<std::size_t>(perm[k])] = static_cast<Index>(k);
    }
    DenseTensor<Scalar> back = permute(moved, inverse);
    back.reshape(theta.dims());
    return back;
}

/// Contraction of sites i and i+1 into a tensor with dims (Dl, d*d, d*d, Dr).
template <typename Scalar>
DenseTensor<Scalar> two_site_block(const PurificationMps<Scalar>& st, Index i) {
    const auto& a = st.site(i);
    const auto& b = st.site(i + 1);
    RowMatrix<Scalar> m = a.matrix(2) * b.matrix(1);
    return DenseTensor<Scalar>::from_matrix(m, {a.dim(0), a.dim(1), b.dim(1), b.dim(2)});
}

/// <state| op (x) 1 |state> / <state|state> for a one-site (d x d) operator at
/// `site` or a two-site (d^2 x d^2) operator on sites (site, site+1).
template <typename Scalar, typename Derived>
Scalar expectation(const PurificationMps<Scalar>& state, const Eigen::MatrixBase<Derived>& op, Index site) {
    state.check_site(site);
    const Index d = state.local_dim();
    Index nsites = 0;
    if (op.rows() == d && op.cols() == d) {
        nsites = 1;
    } else if (op.rows() == d * d && op.cols() == d * d) {
        nsites = 2;
        if (site + 1 >= state.length()) {
            throw RangeError("two-site operator needs site + 1 inside the chain");
        }
    } else {
        throw DimensionError("operator must be d x d or d^2 x d^2");
    }
    PurificationMps<Scalar> st = state;
    move_center(st, site);
    const DenseTensor<Scalar> theta = nsites == 1 ? st.site(site) : two_site_block(st, site);
    const DenseTensor<Scalar> applied = apply_physical(theta, op, d, nsites);
    return theta.data().dot(applied.data()) / theta.data().squaredNorm();
}

/// Physical reduced density matrix of one site (ancilla and all other sites traced out).
template <typename Scalar>
RowMatrix<Scalar> site_density_matrix(const PurificationMps<Scalar>& state, Index site) {
    PurificationMps<Scalar> st = state;
    move_center(st, site);
    const auto& t = st.site(site);
    const Index d = st.local_dim();
    const DenseTensor<Scalar> moved = permute(t.reshaped({t.dim(0), d, d, t.dim(2)}), {1, 0, 2, 3});
    const auto m = moved.matrix(1);
    RowMatrix<Scalar> rho = m * m.adjoint();
    return rho / rho.trace();
}

} // namespace tdsmps
