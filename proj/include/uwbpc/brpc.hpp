#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uwbpc/game.hpp"
#include "uwbpc/rng.hpp"

namespace uwbpc {

enum class BrpcInit { ZeroPlusEps, UniformRandom, Given };
enum class BrpcUpdate { Distributed, Direct };

struct BrpcConfig {
    std::size_t max_sweeps = 10000;
    double tol_power_rel = 1e-9;
    BrpcInit init = BrpcInit::ZeroPlusEps;
    std::uint64_t init_seed = 0;           // UniformRandom only
    std::vector<double> init_powers;       // Given only
    // Distributed: multiplicative update from the fed-back SINR.
    // Direct: best-response formula with interference reconstructed from
    // the same SINR; algebraically identical trajectory.
    BrpcUpdate update_form = BrpcUpdate::Distributed;
    bool record_trace = true;

    void validate() const {
        if (max_sweeps < 1)
            throw std::invalid_argument("BrpcConfig: max_sweeps must be >= 1");
        if (tol_power_rel <= 0.0)
            throw std::invalid_argument("BrpcConfig: tol_power_rel must be > 0");
    }
};

struct EquilibriumOutcome {
    std::vector<double> powers;       // W
    std::vector<double> sinrs;
    std::vector<double> utilities;    // bits/Joule
    std::vector<double> target_sinr;  // gamma*_k
    std::vector<bool> clipped;        // at p_max and short of gamma*_k
    std::size_t iterations = 0;       // completed sweeps
    bool converged = false;
};

struct IterationTrace {
    // snapshot 0 is the initialization; one snapshot per completed sweep after
    std::vector<std::vector<double>> powers;
    std::vector<std::vector<double>> sinrs;
};

/// Interference-plus-noise seen by user k, reconstructed from its own power
/// and fed-back SINR: h_sp p (1 - g/Gamma) / g. Equals the direct MAI sum
/// plus noise whenever (p, g) are consistent with the SINR formula.
inline double reconstruct_interference(const GainSet& gains, double power_k,
                                       double sinr_k, std::size_t k) {
    if (power_k <= 0.0 || sinr_k <= 0.0)
        throw std::domain_error("reconstruct_interference: need p > 0 and SINR > 0");
    return gains.h_sp[k] * power_k * (1.0 - sinr_k / gains.gamma_cap[k]) / sinr_k;
}

/// Gauss-Seidel best-response sweeps until the largest relative power change
/// in a sweep drops below tol. SINRs are recomputed after every single-user
/// update.
template <typename Eff>
std::pair<EquilibriumOutcome, IterationTrace> run_brpc(const GainSet& gains,
                                                       const GameParams& params,
                                                       const Eff& f,
                                                       const BrpcConfig& cfg) {
    cfg.validate();
    const std::size_t K = gains.users();
    constexpr double kPowerFloor = 1e-30;

    std::vector<double> gstar(K);
    for (std::size_t k = 0; k < K; ++k)
        gstar[k] = solve_target_sinr(f, gains.gamma_cap[k]);

    std::vector<double> p(K);
    switch (cfg.init) {
        case BrpcInit::ZeroPlusEps: {
            double hmax = 0.0;
            for (double h : gains.h_sp) hmax = std::max(hmax, h);
            double eps = 1e-3 * params.noise_var_w / hmax;
            p.assign(K, eps);
            break;
        }
        case BrpcInit::UniformRandom: {
            CounterRng rng(cfg.init_seed, 0xb27c);
            for (std::size_t k = 0; k < K; ++k) {
                p[k] = rng.uniform(0.0, params.p_max_w);
                if (p[k] <= 0.0) p[k] = kPowerFloor;
            }
            break;
        }
        case BrpcInit::Given:
            if (cfg.init_powers.size() != K)
                throw std::invalid_argument("BrpcConfig: init_powers size mismatch");
            p = cfg.init_powers;
            for (double& pk : p)
                if (pk <= 0.0) pk = kPowerFloor;
            break;
    }

    IterationTrace trace;
    auto snapshot = [&]() {
        if (!cfg.record_trace) return;
        trace.powers.push_back(p);
        std::vector<double> s(K);
        for (std::size_t k = 0; k < K; ++k)
            s[k] = sinr(gains, p, params.noise_var_w, k);
        trace.sinrs.push_back(std::move(s));
    };
    snapshot();

    EquilibriumOutcome out;
    out.target_sinr = gstar;
    out.converged = false;

    std::size_t sweep = 0;
    for (; sweep < cfg.max_sweeps; ++sweep) {
        double max_rel_change = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double g = sinr(gains, p, params.noise_var_w, k);
            double cap_g = 1.0 - g / gains.gamma_cap[k];
            double cap_s = 1.0 - gstar[k] / gains.gamma_cap[k];
            double next;
            if (cfg.update_form == BrpcUpdate::Distributed) {
                next = p[k] * (gstar[k] / g) * cap_g / cap_s;
            } else {
                double interference = reconstruct_interference(gains, p[k], g, k);
                next = gstar[k] * interference / (gains.h_sp[k] * cap_s);
            }
            next = std::min(params.p_max_w, std::max(0.0, next));
            double rel = std::fabs(next - p[k]) / std::max(p[k], kPowerFloor);
            max_rel_change = std::max(max_rel_change, rel);
            p[k] = next;
        }
        snapshot();
        if (max_rel_change < cfg.tol_power_rel) {
            out.converged = true;
            ++sweep;
            break;
        }
    }

    out.iterations = sweep;
    out.powers = p;
    out.sinrs.resize(K);
    out.utilities.resize(K);
    out.clipped.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        out.sinrs[k] = sinr(gains, p, params.noise_var_w, k);
        out.utilities[k] = utility(params, f, p[k], out.sinrs[k]);
        out.clipped[k] = (p[k] >= params.p_max_w) &&
                         (out.sinrs[k] < gstar[k] * (1.0 - 1e-6));
    }
    return {std::move(out), std::move(trace)};
}

}  // namespace uwbpc
