#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "uwbpc/efficiency.hpp"
#include "uwbpc/linalg.hpp"
#include "uwbpc/params.hpp"
#include "uwbpc/rake.hpp"
#include "uwbpc/root_find.hpp"

namespace uwbpc {

/// Utility in bits/Joule: (D/M) R f(gamma) / p, with u = 0 at p = 0
/// (the limit, since f'(0) = 0).
template <typename Eff>
double utility(const GameParams& params, const Eff& f, double power_w,
               double gamma) {
    if (power_w < 0.0)
        throw std::domain_error("utility: negative power");
    if (power_w == 0.0) return 0.0;
    double overhead = static_cast<double>(params.info_bits) /
                      static_cast<double>(params.packet_bits);
    return overhead * params.rate_bps * f.value(gamma) / power_w;
}

/// Rake-output SINR of user k for the given power vector.
inline double sinr(const GainSet& gains, const std::vector<double>& powers,
                   double noise_var, std::size_t k) {
    const std::size_t K = gains.users();
    double mai = 0.0;
    for (std::size_t j = 0; j < K; ++j)
        if (j != k) mai += gains.mai(k, j) * powers[j];
    double den = gains.h_si[k] * powers[k] + mai + noise_var;
    return gains.h_sp[k] * powers[k] / den;
}

/// Unique positive root of f'(g) g (1 - g/Gamma) = f(g) on (0, Gamma).
/// Pass gamma_cap = +inf for the no-self-interference case. Bracketed
/// bisection to localize, then safeguarded Newton to polish.
template <typename Eff>
double solve_target_sinr(const Eff& f, double gamma_cap) {
    if (!(gamma_cap >= 1.0))
        throw std::domain_error("solve_target_sinr: gamma_cap must be >= 1 or inf");
    const bool finite_cap = std::isfinite(gamma_cap);

    auto g = [&](double x) {
        return f.derivative(x) * x * (1.0 - x / gamma_cap) - f.value(x);
    };
    auto dg = [&](double x) {
        double cap = 1.0 - x / gamma_cap;
        return f.second_derivative(x) * x * cap +
               f.derivative(x) * (cap - x / gamma_cap) - f.derivative(x);
    };

    // g > 0 just above zero (f' g / f ~ M), g < 0 approaching the cap.
    double lo = 1e-12;
    double hi;
    if (finite_cap) {
        hi = gamma_cap * (1.0 - 1e-12);
    } else {
        hi = 1.0;
        int guard = 0;
        while (g(hi) > 0.0) {
            hi *= 2.0;
            if (++guard > 1024)
                throw std::runtime_error("solve_target_sinr: no sign change found");
        }
    }
    if (g(lo) <= 0.0) {
        // f and f' underflow to zero for tiny gamma when M is large; walk lo
        // up until g turns positive (it must, below the root)
        while (lo < hi && g(lo) <= 0.0) lo *= 2.0;
        if (!(lo < hi) || g(lo) <= 0.0)
            throw std::runtime_error("solve_target_sinr: cannot bracket root");
    }

    RootResult coarse = bisect(g, lo, hi, 1e-6, 200);
    double span = std::max(1e-4, 1e-3 * coarse.x);
    double blo = std::max(lo, coarse.x - span);
    double bhi = std::min(hi, coarse.x + span);
    if (g(blo) * g(bhi) > 0.0) {
        blo = lo;
        bhi = hi;
    }
    RootResult fine = newton_bracketed(g, dg, blo, bhi, 1e-13, 200);
    if (!fine.converged)
        fine = bisect(g, blo, bhi, 1e-13, 400);
    return fine.x;
}

/// Best response of user k to the other users' powers: the unconstrained
/// utility maximizer clipped at p_max.
template <typename Eff>
double best_response(const GainSet& gains, const std::vector<double>& powers,
                     const GameParams& params, const Eff& f, std::size_t k) {
    const std::size_t K = gains.users();
    double interference = params.noise_var_w;
    for (std::size_t j = 0; j < K; ++j)
        if (j != k) interference += gains.mai(k, j) * powers[j];
    double gstar = solve_target_sinr(f, gains.gamma_cap[k]);
    double p = gstar * interference /
               (gains.h_sp[k] * (1.0 - gstar / gains.gamma_cap[k]));
    return std::min(params.p_max_w, p);
}

struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> target_sinr;          // gamma*_k
    std::optional<std::vector<double>> min_powers;  // present iff feasible
};

/// Achievability check for the per-user target SINRs, with the minimum-power
/// solution when it exists. The aggregate margin 1 - gamma*(1/Gamma + 1/Z)
/// screens out overloaded draws; the powers themselves come from the exact
/// K x K balance system (every user at its own target SINR), since the
/// scalar margin formula assumes a common received power h_sp p across users
/// and is only approximate per realization.
template <typename Eff>
FeasibilityResult check_feasibility(const GainSet& gains, const GameParams& params,
                                    const Eff& f) {
    const std::size_t K = gains.users();
    FeasibilityResult r;
    r.target_sinr.resize(K);
    r.feasible = true;
    for (std::size_t k = 0; k < K; ++k) {
        double gstar = solve_target_sinr(f, gains.gamma_cap[k]);
        r.target_sinr[k] = gstar;
        double margin = 1.0 - gstar * (1.0 / gains.gamma_cap[k] + gains.z_inv[k]);
        if (margin <= 0.0) r.feasible = false;
    }
    if (!r.feasible) return r;

    std::vector<double> a(K * K, 0.0);
    std::vector<double> b(K);
    for (std::size_t k = 0; k < K; ++k) {
        a[k * K + k] = gains.h_sp[k] - r.target_sinr[k] * gains.h_si[k];
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) a[k * K + j] = -r.target_sinr[k] * gains.mai(k, j);
        b[k] = r.target_sinr[k] * params.noise_var_w;
    }
    std::vector<double> p;
    try {
        p = detail::solve_linear(std::move(a), std::move(b));
    } catch (const std::runtime_error&) {
        r.feasible = false;
        return r;
    }
    for (double pk : p)
        if (!(pk > 0.0)) r.feasible = false;
    if (r.feasible) r.min_powers = std::move(p);
    return r;
}

}  // namespace uwbpc
