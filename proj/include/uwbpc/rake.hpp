#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "uwbpc/channel.hpp"
#include "uwbpc/params.hpp"

namespace uwbpc {

enum class RakeKind { ARake, PRake, SRake };

struct RakeConfig {
    RakeKind kind = RakeKind::ARake;
    std::size_t fingers = 0;  // ignored for ARake

    void validate(std::size_t paths) const {
        if (kind != RakeKind::ARake && (fingers < 1 || fingers > paths))
            throw std::invalid_argument("RakeConfig: fingers must be in [1, paths]");
    }
};

/// Signal, self-interference and MAI gains of one realization, plus the
/// derived SI ratio Gamma_k and MAI ratio Z_k^-1. gamma_cap uses IEEE
/// infinity as the exact no-self-interference sentinel: (1 - g/inf) == 1.
struct GainSet {
    std::vector<double> h_sp;       // K
    std::vector<double> h_si;       // K
    std::vector<double> h_mai;      // K*K row-major, diagonal unused (0)
    std::vector<double> gamma_cap;  // K, h_sp/h_si, +inf when h_si == 0
    std::vector<double> z_inv;      // K, sum_{j!=k} h_mai[kj]/h_sp[j]

    std::size_t users() const { return h_sp.size(); }
    double mai(std::size_t k, std::size_t j) const { return h_mai[k * users() + j]; }
};

/// Rake combining weights beta_k = G * alpha_k for the configured receiver.
inline std::vector<double> build_weights(const ChannelRealization& real,
                                         const RakeConfig& cfg, std::size_t k) {
    const std::vector<double>& a = real.alpha.at(k);
    cfg.validate(a.size());
    std::vector<double> beta = a;
    switch (cfg.kind) {
        case RakeKind::ARake:
            break;
        case RakeKind::PRake:
            std::fill(beta.begin() + static_cast<std::ptrdiff_t>(cfg.fingers),
                      beta.end(), 0.0);
            break;
        case RakeKind::SRake: {
            std::vector<std::size_t> order(a.size());
            std::iota(order.begin(), order.end(), 0);
            // strongest |alpha| first, ties broken by lower tap index
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t x, std::size_t y) {
                                 return std::fabs(a[x]) > std::fabs(a[y]);
                             });
            std::fill(beta.begin(), beta.end(), 0.0);
            for (std::size_t f = 0; f < cfg.fingers; ++f) beta[order[f]] = a[order[f]];
            break;
        }
    }
    return beta;
}

/// Chip-overlap weights phi_l = sqrt(min(L-l, N_c)/N_c), l = 1..L-1.
inline std::vector<double> phi_weights(std::size_t paths, std::size_t chips) {
    std::vector<double> phi(paths > 0 ? paths - 1 : 0);
    for (std::size_t l = 1; l < paths; ++l) {
        double m = std::min<double>(static_cast<double>(paths - l),
                                    static_cast<double>(chips));
        phi[l - 1] = std::sqrt(m / static_cast<double>(chips));
    }
    return phi;
}

namespace detail {

// Column i (1-based) of the upper-shift matrix product:
// (X^H y)_i = sum_{l=1}^{i} x[L-i+l] * y[l], where X is built from x.
// Returns the full vector of L-1 column sums.
inline void shift_columns(const std::vector<double>& x, const std::vector<double>& y,
                          std::vector<double>& out) {
    const std::size_t L = x.size();
    out.assign(L > 0 ? L - 1 : 0, 0.0);
    for (std::size_t i = 1; i < L; ++i) {
        double s = 0.0;
        const std::size_t off = L - i;  // 1-based tap L-i+l -> 0-based off+l-1
        for (std::size_t l = 1; l <= i; ++l) s += x[off + l - 1] * y[l - 1];
        out[i - 1] = s;
    }
}

}  // namespace detail

/// Exact gains of one realization under the configured Rake receiver.
/// Computed from the banded shift structure directly; never materializes
/// the L x (L-1) matrices.
inline GainSet compute_gains(const ChannelRealization& real, const RakeConfig& cfg,
                             const GameParams& params) {
    const std::size_t K = real.alpha.size();
    const std::size_t L = params.paths;
    const double N = static_cast<double>(params.processing_gain());
    if (K != params.users)
        throw std::invalid_argument("compute_gains: realization/params user mismatch");

    std::vector<std::vector<double>> beta(K);
    for (std::size_t k = 0; k < K; ++k) beta[k] = build_weights(real, cfg, k);

    const std::vector<double> phi = phi_weights(L, params.chips);

    GainSet g;
    g.h_sp.assign(K, 0.0);
    g.h_si.assign(K, 0.0);
    g.h_mai.assign(K * K, 0.0);
    g.gamma_cap.assign(K, 0.0);
    g.z_inv.assign(K, 0.0);

    for (std::size_t k = 0; k < K; ++k) {
        double sp = 0.0;
        for (std::size_t l = 0; l < L; ++l) sp += beta[k][l] * real.alpha[k][l];
        if (sp <= 0.0)
            throw std::runtime_error(
                "compute_gains: nonpositive h_sp (anti-correlated weights); "
                "realization rejected");
        g.h_sp[k] = sp;
    }

    std::vector<double> col_a, col_b;
    for (std::size_t k = 0; k < K; ++k) {
        // self interference: || Phi (B_k^H a_k + A_k^H b_k) ||^2 / (N h_sp)
        detail::shift_columns(beta[k], real.alpha[k], col_a);   // B_k^H alpha_k
        detail::shift_columns(real.alpha[k], beta[k], col_b);   // A_k^H beta_k
        double si = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            double s = col_a[i] + col_b[i];
            si += phi[i] * phi[i] * s * s;
        }
        g.h_si[k] = si / (N * g.h_sp[k]);
        g.gamma_cap[k] = g.h_si[k] > 0.0
                             ? g.h_sp[k] / g.h_si[k]
                             : std::numeric_limits<double>::infinity();

        for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            detail::shift_columns(beta[k], real.alpha[j], col_a);  // B_k^H alpha_j
            detail::shift_columns(real.alpha[j], beta[k], col_b);  // A_j^H beta_k
            double q = 0.0;
            for (std::size_t i = 0; i < col_a.size(); ++i)
                q += col_a[i] * col_a[i] + col_b[i] * col_b[i];
            double dot = 0.0;
            for (std::size_t l = 0; l < L; ++l) dot += beta[k][l] * real.alpha[j][l];
            g.h_mai[k * K + j] = (q + dot * dot) / (N * g.h_sp[k]);
        }
    }

    for (std::size_t k = 0; k < K; ++k) {
        double z = 0.0;
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) z += g.mai(k, j) / g.h_sp[j];
        g.z_inv[k] = z;
    }
    return g;
}

}  // namespace uwbpc
