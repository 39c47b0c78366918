#include "tdsmps/evolution.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <iomanip>

namespace tdsmps {

double TrotterPlan::coefficient_sum(Parity p) const {
    double s = 0;
    for (const auto& l : layers) {
        if (l.parity == p) {
            s += l.coefficient;
        }
    }
    return s;
}

double suzuki_fractal_coefficient() { return 1.0 / (4.0 - std::cbrt(4.0)); }

TrotterPlan build_trotter_plan(int order, double dtau) {
    if (!(dtau > 0) || !std::isfinite(dtau)) {
        throw ParameterError("dtau must be positive");
    }
    TrotterPlan plan;
    plan.order = order;
    plan.dtau = dtau;
    auto strang = [&](double c) {
        plan.layers.push_back({Parity::even, 0.5 * c});
        plan.layers.push_back({Parity::odd, c});
        plan.layers.push_back({Parity::even, 0.5 * c});
    };
    if (order == 2) {
        strang(1.0);
    } else if (order == 4) {
        const double p = suzuki_fractal_coefficient();
        for (double c : {p, p, 1.0 - 4.0 * p, p, p}) {
            strang(c);
        }
    } else {
        throw ParameterError("unsupported Trotter order " + std::to_string(order) + " (use 2 or 4)");
    }
    return plan;
}

std::string plan_hash(const TrotterPlan& plan) {
    // FNV-1a over the exact bit patterns.
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < n; ++k) {
            h ^= bytes[k];
            h *= 1099511628211ULL;
        }
    };
    feed(&plan.order, sizeof plan.order);
    feed(&plan.dtau, sizeof plan.dtau);
    for (const auto& l : plan.layers) {
        const int parity = static_cast<int>(l.parity);
        feed(&parity, sizeof parity);
        feed(&l.coefficient, sizeof l.coefficient);
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

Eigen::MatrixXd gate_exponential(const Eigen::MatrixXd& h, double x) {
    if (h.rows() != h.cols()) {
        throw DimensionError("gate_exponential needs a square matrix");
    }
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ParameterError("gate_exponential needs a hermitian matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed in gate_exponential");
    }
    const Eigen::VectorXd ex = (-x * es.eigenvalues().array()).exp();
    return es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().transpose();
}

std::vector<TrotterLayer> fused_layers(const TrotterPlan& plan, long steps) {
    std::vector<TrotterLayer> out;
    for (long s = 0; s < steps; ++s) {
        for (const auto& l : plan.layers) {
            if (!out.empty() && out.back().parity == l.parity) {
                out.back().coefficient += l.coefficient;
            } else {
                out.push_back(l);
            }
        }
    }
    return out;
}

} // namespace tdsmps
