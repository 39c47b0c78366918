#include "tdsmps/models.hpp"

#include <cmath>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "tdsmps/errors.hpp"

namespace tdsmps {

namespace {

bool valid_spin(double spin) {
    const double twice = 2.0 * spin;
    return spin > 0 && std::abs(twice - std::round(twice)) < 1e-12;
}

std::string fmt_num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

long ModelSpec::local_dim() const {
    switch (kind) {
    case ModelKind::xxz_half:
        return 2;
    case ModelKind::heisenberg_spin_s:
        return std::lround(2.0 * spin) + 1;
    case ModelKind::bilinear_biquadratic_spin1:
        return 3;
    case ModelKind::bose_hubbard:
        return n_max + 1;
    }
    return 0;
}

std::string ModelSpec::id() const {
    switch (kind) {
    case ModelKind::xxz_half:
        return "xxz_half(delta=" + fmt_num(delta) + ")";
    case ModelKind::heisenberg_spin_s:
        return "heisenberg_spin_s(S=" + fmt_num(spin) + ")";
    case ModelKind::bilinear_biquadratic_spin1:
        return "bilinear_biquadratic_spin1(theta=" + fmt_num(theta) + ")";
    case ModelKind::bose_hubbard:
        return "bose_hubbard(J=" + fmt_num(hopping) + ";U=" + fmt_num(interaction) +
               ";mu=" + fmt_num(chemical_potential) + ";nmax=" + std::to_string(n_max) + ")";
    }
    return {};
}

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::xxz_half:
        return "xxz_half";
    case ModelKind::heisenberg_spin_s:
        return "heisenberg_spin_s";
    case ModelKind::bilinear_biquadratic_spin1:
        return "bilinear_biquadratic_spin1";
    case ModelKind::bose_hubbard:
        return "bose_hubbard";
    }
    return {};
}

ModelKind parse_model_kind(const std::string& name) {
    for (auto k : {ModelKind::xxz_half, ModelKind::heisenberg_spin_s, ModelKind::bilinear_biquadratic_spin1,
                   ModelKind::bose_hubbard}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ParameterError("unknown model kind '" + name + "'");
}

SpinMatrices spin_matrices(double spin) {
    if (!valid_spin(spin)) {
        throw ParameterError("spin must be a positive multiple of 1/2");
    }
    const long d = std::lround(2.0 * spin) + 1;
    SpinMatrices s;
    s.sz = Eigen::MatrixXd::Zero(d, d);
    s.splus = Eigen::MatrixXd::Zero(d, d);
    for (long k = 0; k < d; ++k) {
        const double m = spin - static_cast<double>(k);
        s.sz(k, k) = m;
        if (k > 0) {
            // S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>, and |m+1> is index k-1.
            s.splus(k - 1, k) = std::sqrt(spin * (spin + 1) - m * (m + 1));
        }
    }
    s.sminus = s.splus.transpose();
    s.sx = 0.5 * (s.splus + s.sminus);
    s.sy = std::complex<double>(0, -0.5) * (s.splus - s.sminus).cast<std::complex<double>>();
    return s;
}

BosonMatrices boson_matrices(long n_max) {
    if (n_max < 1) {
        throw ParameterError("n_max must be at least 1");
    }
    const long d = n_max + 1;
    BosonMatrices b;
    b.annihilation = Eigen::MatrixXd::Zero(d, d);
    b.number = Eigen::MatrixXd::Zero(d, d);
    for (long n = 0; n < d; ++n) {
        b.number(n, n) = static_cast<double>(n);
        if (n > 0) {
            b.annihilation(n - 1, n) = std::sqrt(static_cast<double>(n));
        }
    }
    b.creation = b.annihilation.transpose();
    return b;
}

Eigen::MatrixXd spin_exchange(double spin) {
    const auto s = spin_matrices(spin);
    using Eigen::kroneckerProduct;
    // Sx Sx + Sy Sy = (S+ S- + S- S+) / 2 keeps everything real.
    Eigen::MatrixXd h = 0.5 * (kroneckerProduct(s.splus, s.sminus) + kroneckerProduct(s.sminus, s.splus)).eval();
    h += kroneckerProduct(s.sz, s.sz);
    return h;
}

std::vector<BondTerm> build_bond_terms(const ModelSpec& spec) {
    if (spec.length < 2) {
        throw ParameterError("chain needs at least two sites");
    }
    using Eigen::kroneckerProduct;
    const long nb = spec.length - 1;
    std::vector<BondTerm> terms;
    terms.reserve(static_cast<std::size_t>(nb));

    switch (spec.kind) {
    case ModelKind::xxz_half: {
        const auto s = spin_matrices(0.5);
        Eigen::MatrixXd h =
            0.5 * (kroneckerProduct(s.splus, s.sminus) + kroneckerProduct(s.sminus, s.splus)).eval();
        h += spec.delta * kroneckerProduct(s.sz, s.sz);
        for (long i = 0; i < nb; ++i) {
            terms.push_back({i, h});
        }
        break;
    }
    case ModelKind::heisenberg_spin_s: {
        const Eigen::MatrixXd h = spin_exchange(spec.spin);
        for (long i = 0; i < nb; ++i) {
            terms.push_back({i, h});
        }
        break;
    }
    case ModelKind::bilinear_biquadratic_spin1: {
        const Eigen::MatrixXd ss = spin_exchange(1.0);
        const Eigen::MatrixXd h = std::cos(spec.theta) * ss + std::sin(spec.theta) * (ss * ss);
        for (long i = 0; i < nb; ++i) {
            terms.push_back({i, h});
        }
        break;
    }
    case ModelKind::bose_hubbard: {
        const auto b = boson_matrices(spec.n_max);
        const long d = spec.n_max + 1;
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
        const Eigen::MatrixXd n = b.number;
        const Eigen::MatrixXd onsite =
            0.5 * spec.interaction * n * (n - id) - spec.chemical_potential * n;
        Eigen::MatrixXd hop = -spec.hopping * (kroneckerProduct(b.creation, b.annihilation) +
                                               kroneckerProduct(b.annihilation, b.creation))
                                                  .eval();
        for (long i = 0; i < nb; ++i) {
            const double wl = (i == 0) ? 1.0 : 0.5;
            const double wr = (i == nb - 1) ? 1.0 : 0.5;
            Eigen::MatrixXd h = hop;
            h += wl * kroneckerProduct(onsite, id);
            h += wr * kroneckerProduct(id, onsite);
            terms.push_back({i, h});
        }
        break;
    }
    }
    return terms;
}

} // namespace tdsmps
