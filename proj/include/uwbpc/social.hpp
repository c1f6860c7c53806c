#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "uwbpc/game.hpp"
#include "uwbpc/linalg.hpp"
#include "uwbpc/lsa.hpp"
#include "uwbpc/params.hpp"
#include "uwbpc/rake.hpp"

namespace uwbpc {

/// Common SINR of the SINR-balanced Pareto-optimal point: root of the
/// target-SINR equation with the effective cap N / (K - 1 + nu(rho)),
/// which internalizes the interference every user causes.
template <typename Eff>
double solve_social_sinr(const GameParams& params, const Eff& f) {
    double eff_load = static_cast<double>(params.users) - 1.0 + nu(params.load_factor());
    double gamma_eff = static_cast<double>(params.processing_gain()) / eff_load;
    if (gamma_eff <= 1.0)
        throw std::runtime_error(
            "solve_social_sinr: processing gain too small for the load "
            "(raise N_f per the minimum-frames bound)");
    return solve_target_sinr(f, gamma_eff);
}

/// Powers that make every user's achieved SINR exactly gamma_opt for this
/// realization: solution of the K x K balance system.
inline std::vector<double> social_powers(const GainSet& gains, double gamma_opt,
                                         double noise_var) {
    const std::size_t K = gains.users();
    std::vector<double> a(K * K, 0.0);
    std::vector<double> b(K, gamma_opt * noise_var);
    for (std::size_t k = 0; k < K; ++k) {
        a[k * K + k] = gains.h_sp[k] - gamma_opt * gains.h_si[k];
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) a[k * K + j] = -gamma_opt * gains.mai(k, j);
    }
    std::vector<double> p = detail::solve_linear(std::move(a), std::move(b));
    for (double pk : p)
        if (!(pk > 0.0))
            throw std::runtime_error(
                "social_powers: balanced SINR infeasible for this realization");
    return p;
}

struct SocialOutcome {
    double gamma_opt = 0.0;
    std::vector<double> powers;
    std::vector<double> utilities;
    double utility_sum = 0.0;
};

template <typename Eff>
SocialOutcome solve_social(const GainSet& gains, const GameParams& params,
                           const Eff& f) {
    SocialOutcome out;
    out.gamma_opt = solve_social_sinr(params, f);
    out.powers = social_powers(gains, out.gamma_opt, params.noise_var_w);
    out.utilities.resize(out.powers.size());
    for (std::size_t k = 0; k < out.powers.size(); ++k) {
        out.utilities[k] = utility(params, f, out.powers[k], out.gamma_opt);
        out.utility_sum += out.utilities[k];
    }
    return out;
}

struct NeVsSocialRow {
    std::size_t trial = 0;
    double mean_norm_utility_ne = 0.0;      // mean over users of u_k / h_k
    double mean_norm_utility_social = 0.0;
    double sum_utility_ne = 0.0;
    double sum_utility_social = 0.0;
    double mean_sinr_ne = 0.0;              // achieved NE SINRs, averaged
    double gamma_opt = 0.0;
    double gamma_star_inf = 0.0;
};

/// Ensemble comparison of the Nash equilibrium (via best-response iteration)
/// against the SINR-balanced social optimum on identical channel draws.
template <typename Eff, typename Brpc>
std::vector<NeVsSocialRow> compare_ne_vs_social(const GameParams& params,
                                                const Eff& f,
                                                const ChannelModel& model,
                                                const RakeConfig& rake,
                                                const Brpc& run_ne,
                                                std::size_t trials,
                                                std::uint64_t seed) {
    if (trials < 1)
        throw std::invalid_argument("compare_ne_vs_social: trials must be >= 1");
    double gamma_star_inf =
        solve_target_sinr(f, std::numeric_limits<double>::infinity());
    std::vector<NeVsSocialRow> rows;
    rows.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        ChannelRealization real =
            draw_realization(model, params, detail::mix64(seed) + t);
        GainSet gains = compute_gains(real, rake, params);

        NeVsSocialRow row;
        row.trial = t;
        row.gamma_star_inf = gamma_star_inf;

        auto ne = run_ne(gains, params, f);  // EquilibriumOutcome
        SocialOutcome so = solve_social(gains, params, f);
        row.gamma_opt = so.gamma_opt;
        const std::size_t K = params.users;
        for (std::size_t k = 0; k < K; ++k) {
            double h = channel_gain(real, k);
            row.mean_norm_utility_ne += ne.utilities[k] / h / K;
            row.mean_norm_utility_social += so.utilities[k] / h / K;
            row.sum_utility_ne += ne.utilities[k];
            row.sum_utility_social += so.utilities[k];
            row.mean_sinr_ne += ne.sinrs[k] / K;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace uwbpc
