#include "tdsmps/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <unsupported/Eigen/KroneckerProduct>

#include "tdsmps/errors.hpp"

namespace tdsmps::oracle {

namespace {

long checked_power(long base, long exp, long cap) {
    long n = 1;
    for (long k = 0; k < exp; ++k) {
        n *= base;
        if (n > cap) {
            throw SizeError("Hilbert space dimension " + std::to_string(base) + "^" + std::to_string(exp) +
                            " exceeds the oracle cap " + std::to_string(cap));
        }
    }
    return n;
}

struct Diagonalized {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

Diagonalized diagonalize(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("dense eigendecomposition failed");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

// Index of (s, sbar) in the paired basis, with s and sbar given in the
// site-1-major d^L basis.
long paired_index(long s, long sbar, long d, long length) {
    long idx = 0;
    long weight = 1;
    for (long site = length - 1; site >= 0; --site) {
        const long a = s % d;
        const long b = sbar % d;
        s /= d;
        sbar /= d;
        idx += (a * d + b) * weight;
        weight *= d * d;
    }
    return idx;
}

} // namespace

Eigen::MatrixXd embed_operator(const Eigen::MatrixXd& op, long site, long local_dim, long length) {
    long k = 0;
    for (long n = 1; n < op.rows(); n *= local_dim) {
        ++k;
    }
    if (site < 0 || site + k > length) {
        throw RangeError("operator support outside the chain");
    }
    const long left = checked_power(local_dim, site, 1L << 30);
    const long right = checked_power(local_dim, length - site - k, 1L << 30);
    Eigen::MatrixXd out =
        Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(left, left),
                                Eigen::kroneckerProduct(op, Eigen::MatrixXd::Identity(right, right)).eval());
    return out;
}

Eigen::MatrixXd dense_hamiltonian(const std::vector<BondTerm>& terms, long local_dim, long length, long cap) {
    const long dim = checked_power(local_dim, length, cap);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : terms) {
        h += embed_operator(t.matrix, t.site, local_dim, length);
    }
    return h;
}

Eigen::MatrixXd dense_hamiltonian(const ModelSpec& spec, long cap) {
    checked_power(spec.local_dim(), spec.length, cap);
    return dense_hamiltonian(build_bond_terms(spec), spec.local_dim(), spec.length, cap);
}

DenseState exact_tds(const Eigen::MatrixXd& hamiltonian, long local_dim, long length, double beta, long cap) {
    const long dim = checked_power(local_dim, length, cap);
    if (hamiltonian.rows() != dim) {
        throw DimensionError("Hamiltonian dimension does not match d^L");
    }
    const auto dg = diagonalize(hamiltonian);
    const double e0 = dg.energies.minCoeff();
    const Eigen::VectorXd w = (-0.5 * beta * (dg.energies.array() - e0)).exp();
    const Eigen::MatrixXd root = dg.vectors * w.asDiagonal() * dg.vectors.transpose();
    return pair(root / root.norm(), local_dim, length);
}

DenseState exact_tds(const ModelSpec& spec, double beta, long cap) {
    return exact_tds(dense_hamiltonian(spec, cap), spec.local_dim(), spec.length, beta, cap);
}

Eigen::MatrixXd exact_thermal_density(const Eigen::MatrixXd& hamiltonian, double beta) {
    const auto dg = diagonalize(hamiltonian);
    const double e0 = dg.energies.minCoeff();
    const Eigen::VectorXd w = (-beta * (dg.energies.array() - e0)).exp();
    Eigen::MatrixXd rho = dg.vectors * w.asDiagonal() * dg.vectors.transpose();
    return rho / rho.trace();
}

Eigen::MatrixXd exact_thermal_density(const ModelSpec& spec, double beta, long cap) {
    return exact_thermal_density(dense_hamiltonian(spec, cap), beta);
}

DenseState pair(const Eigen::MatrixXd& psi, long local_dim, long length) {
    const long dim = psi.rows();
    DenseState out{local_dim, length, Eigen::VectorXd::Zero(dim * dim)};
    for (long s = 0; s < dim; ++s) {
        for (long sb = 0; sb < dim; ++sb) {
            out.coefficients[paired_index(s, sb, local_dim, length)] = psi(s, sb);
        }
    }
    return out;
}

Eigen::MatrixXd unpair(const DenseState& state) {
    long dim = 1;
    for (long k = 0; k < state.length; ++k) {
        dim *= state.local_dim;
    }
    if (state.coefficients.size() != dim * dim) {
        throw DimensionError("state length does not match (d*d)^L");
    }
    Eigen::MatrixXd psi(dim, dim);
    for (long s = 0; s < dim; ++s) {
        for (long sb = 0; sb < dim; ++sb) {
            psi(s, sb) = state.coefficients[paired_index(s, sb, state.local_dim, state.length)];
        }
    }
    return psi;
}

Eigen::MatrixXd physical_density(const DenseState& state) {
    const Eigen::MatrixXd psi = unpair(state);
    return psi * psi.transpose();
}

namespace {

BondSpectrum spectrum_of_split(const Eigen::VectorXd& v, long rows, long bond) {
    const long cols = v.size() / rows;
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(v.data(), rows,
                                                                                                      cols);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    std::vector<double> w;
    for (long k = 0; k < svd.singularValues().size(); ++k) {
        w.push_back(svd.singularValues()[k] * svd.singularValues()[k]);
    }
    return make_spectrum(std::move(w), bond);
}

} // namespace

BondSpectrum reduced_spectrum(const DenseState& state, long bond) {
    if (bond < 1 || bond >= state.length) {
        throw RangeError("bond outside 1..L-1");
    }
    const long rows = checked_power(state.local_dim * state.local_dim, bond, 1L << 30);
    return spectrum_of_split(state.coefficients, rows, bond);
}

BondSpectrum pure_state_spectrum(const Eigen::VectorXd& psi, long local_dim, long length, long bond) {
    if (bond < 1 || bond >= length) {
        throw RangeError("bond outside 1..L-1");
    }
    return spectrum_of_split(psi, checked_power(local_dim, bond, 1L << 30), bond);
}

GapResult energy_gap(const ModelSpec& spec, long cap) {
    const auto dg = diagonalize(dense_hamiltonian(spec, cap));
    if (dg.energies.size() < 2) {
        throw ParameterError("gap needs at least two levels");
    }
    return {dg.energies[0], dg.energies[1]};
}

Eigen::VectorXd ground_state(const Eigen::MatrixXd& hamiltonian) {
    return diagonalize(hamiltonian).vectors.col(0);
}

Eigen::VectorXd xx_single_particle_energies(long length) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(length, length);
    for (long i = 0; i + 1 < length; ++i) {
        h(i, i + 1) = h(i + 1, i) = 0.5;
    }
    return diagonalize(h).energies;
}

Eigen::VectorXd xx_tds_mode_occupations(long length, double beta, long bond) {
    if (bond < 1 || bond >= length) {
        throw RangeError("bond outside 1..L-1");
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(length, length);
    for (long i = 0; i + 1 < length; ++i) {
        h(i, i + 1) = h(i + 1, i) = 0.5;
    }
    const auto dg = diagonalize(h);
    const long n = length;
    Eigen::VectorXd f(n), g(n), fg(n);
    for (long k = 0; k < n; ++k) {
        const double x = beta * dg.energies[k];
        // Fermi factors in overflow-safe form.
        f[k] = x > 0 ? std::exp(-x) / (1 + std::exp(-x)) : 1 / (1 + std::exp(x));
        g[k] = 1 - f[k];
        fg[k] = 0.5 / std::cosh(0.5 * x);
    }
    const auto& v = dg.vectors;
    const Eigen::MatrixXd cpp = v * f.asDiagonal() * v.transpose();
    const Eigen::MatrixXd caa = v * g.asDiagonal() * v.transpose();
    const Eigen::MatrixXd cpa = v * fg.asDiagonal() * v.transpose();
    Eigen::MatrixXd c(2 * bond, 2 * bond);
    c.topLeftCorner(bond, bond) = cpp.topLeftCorner(bond, bond);
    c.bottomRightCorner(bond, bond) = caa.topLeftCorner(bond, bond);
    c.topRightCorner(bond, bond) = cpa.topLeftCorner(bond, bond);
    c.bottomLeftCorner(bond, bond) = cpa.topLeftCorner(bond, bond).transpose();
    Eigen::VectorXd nu = diagonalize(c).energies;
    return nu.cwiseMax(0.0).cwiseMin(1.0);
}

double free_fermion_renyi(const Eigen::VectorXd& occupations, double alpha) {
    if (!(alpha > 0)) {
        throw DomainError("Renyi index alpha must be positive");
    }
    double s = 0;
    for (long k = 0; k < occupations.size(); ++k) {
        const double a = occupations[k];
        const double b = 1 - a;
        if (alpha == 1.0) {
            if (a > 0) {
                s -= a * std::log(a);
            }
            if (b > 0) {
                s -= b * std::log(b);
            }
        } else {
            s += std::log(std::pow(a, alpha) + std::pow(b, alpha)) / (1 - alpha);
        }
    }
    return s;
}

std::vector<double> free_fermion_spectrum(const Eigen::VectorXd& occupations, double cutoff) {
    if (!(cutoff > 0)) {
        throw ParameterError("free-fermion spectrum needs a positive cutoff");
    }
    double base = 1;
    std::vector<double> ratios;
    for (long k = 0; k < occupations.size(); ++k) {
        const double hi = std::max(occupations[k], 1 - occupations[k]);
        const double lo = 1 - hi;
        base *= hi;
        ratios.push_back(lo / hi);
    }
    std::sort(ratios.begin(), ratios.end(), std::greater<>());
    std::vector<double> out;
    std::function<void(std::size_t, double)> walk = [&](std::size_t first, double value) {
        out.push_back(value);
        for (std::size_t j = first; j < ratios.size(); ++j) {
            const double next = value * ratios[j];
            if (next < cutoff) {
                break;
            }
            walk(j + 1, next);
        }
    };
    if (base >= cutoff) {
        walk(0, base);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double xx_free_fermion_gap(long length) {
    // Ground state fills every negative level; the cheapest excitation adds or
    // removes the particle closest to zero energy.
    const Eigen::VectorXd e = xx_single_particle_energies(length);
    return e.cwiseAbs().minCoeff();
}

double trace_norm(const Eigen::MatrixXd& x) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues().sum();
}

double trace_norm(const Eigen::MatrixXcd& x) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(x).singularValues().sum();
}

} // namespace tdsmps::oracle
