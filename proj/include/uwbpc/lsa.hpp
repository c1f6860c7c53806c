#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "uwbpc/channel.hpp"
#include "uwbpc/game.hpp"
#include "uwbpc/params.hpp"
#include "uwbpc/rake.hpp"

namespace uwbpc {

/// Per-user second-order profiles entering the large-system limits:
/// path_var[k][l] = Var[alpha_k,l], rake_var[k][l] = Var[beta_k,l].
/// The shifted-matrix profiles are derived from these on the fly (the
/// upper-shift structure fixes which tap variance lands in each slot).
struct VarianceProfiles {
    std::vector<std::vector<double>> path_var;
    std::vector<std::vector<double>> rake_var;

    std::size_t users() const { return path_var.size(); }
    std::size_t paths() const { return path_var.empty() ? 0 : path_var[0].size(); }
};

/// Profiles from the channel model directly (unit large-scale factor; the
/// limits are invariant to per-user scaling anyway). SRake selection depends
/// on the realization, so it has no deterministic diagonal G and is refused.
inline VarianceProfiles make_profiles(const ChannelModel& model,
                                      const GameParams& params,
                                      const RakeConfig& rake) {
    if (rake.kind == RakeKind::SRake)
        throw std::invalid_argument(
            "make_profiles: SRake has channel-dependent selection; "
            "large-system limits support ARake/PRake only");
    rake.validate(params.paths);
    VarianceProfiles vp;
    vp.path_var.resize(params.users);
    vp.rake_var.resize(params.users);
    for (std::size_t k = 0; k < params.users; ++k) {
        vp.path_var[k] = model.tap_variances(k, params.paths);
        vp.rake_var[k] = vp.path_var[k];
        if (rake.kind == RakeKind::PRake)
            for (std::size_t l = rake.fingers; l < params.paths; ++l)
                vp.rake_var[k][l] = 0.0;
    }
    return vp;
}

/// Profiles recorded by an actual realization (includes pathloss/shadowing).
inline VarianceProfiles make_profiles(const ChannelRealization& real,
                                      const RakeConfig& rake) {
    if (rake.kind == RakeKind::SRake)
        throw std::invalid_argument(
            "make_profiles: SRake unsupported in large-system limits");
    const std::size_t K = real.std_profile.size();
    const std::size_t L = K ? real.std_profile[0].size() : 0;
    rake.validate(L);
    VarianceProfiles vp;
    vp.path_var.resize(K);
    vp.rake_var.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        vp.path_var[k].resize(L);
        for (std::size_t l = 0; l < L; ++l)
            vp.path_var[k][l] = real.std_profile[k][l] * real.std_profile[k][l];
        vp.rake_var[k] = vp.path_var[k];
        if (rake.kind == RakeKind::PRake)
            for (std::size_t l = rake.fingers; l < L; ++l) vp.rake_var[k][l] = 0.0;
    }
    return vp;
}

namespace detail {

// (1/L) Tr(D_k D~_k), the trace-average of the diagonal profile product.
inline double psi_diag(const VarianceProfiles& vp, std::size_t k) {
    const std::size_t L = vp.paths();
    double s = 0.0;
    for (std::size_t l = 0; l < L; ++l)
        s += std::sqrt(vp.path_var[k][l] * vp.rake_var[k][l]);
    return s / static_cast<double>(L);
}

// (1/L) Tr(D C C^H D) for the upper-shift profile C built from `shift_var`
// and the diagonal profile `diag_var`. Row l (1-based) of C C^H sums
// shift_var[L-i+l] over columns i = l..L-1.
inline double psi_shift(const std::vector<double>& diag_var,
                        const std::vector<double>& shift_var) {
    const std::size_t L = diag_var.size();
    double s = 0.0;
    for (std::size_t l = 1; l < L; ++l) {  // row L has no entries
        double row = 0.0;
        for (std::size_t i = l; i <= L - 1; ++i) row += shift_var[L - i + l - 1];
        s += diag_var[l - 1] * row;
    }
    return s / (static_cast<double>(L) * static_cast<double>(L));
}

}  // namespace detail

/// Large-system limit of the MAI ratio Z_k^-1 for every user, evaluated at
/// finite L by the trace-average plug-in.
inline std::vector<double> limit_z_inv(const VarianceProfiles& vp,
                                          const GameParams& params) {
    const std::size_t K = vp.users();
    const double N = static_cast<double>(params.processing_gain());
    std::vector<double> psi(K);
    for (std::size_t k = 0; k < K; ++k) {
        psi[k] = detail::psi_diag(vp, k);
        if (psi[k] <= 0.0)
            throw std::invalid_argument("limit_z_inv: degenerate variance profile");
    }
    std::vector<double> out(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            double t1 = detail::psi_shift(vp.path_var[j], vp.rake_var[k]);
            double t2 = detail::psi_shift(vp.rake_var[k], vp.path_var[j]);
            sum += (t1 + t2) / (psi[j] * psi[k]);
        }
        out[k] = sum / N;
    }
    return out;
}

/// Large-system limit of the inverse SI ratio Gamma_k^-1 for every user,
/// evaluated at finite L.
inline std::vector<double> limit_gamma_inv(const VarianceProfiles& vp,
                                              const GameParams& params) {
    const std::size_t K = vp.users();
    const std::size_t L = vp.paths();
    const double N = static_cast<double>(params.processing_gain());
    const std::vector<double> phi = phi_weights(L, params.chips);

    std::vector<double> out(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double psi = detail::psi_diag(vp, k);
        if (psi <= 0.0)
            throw std::invalid_argument("limit_gamma_inv: degenerate variance profile");
        const std::vector<double>& dv = vp.path_var[k];
        const std::vector<double>& rv = vp.rake_var[k];
        double num = 0.0;
        for (std::size_t i = 1; i < L; ++i) {
            double inner = 0.0;
            for (std::size_t l = 1; l <= i; ++l) {
                std::size_t a = l - 1;          // tap l
                std::size_t b = L + l - i - 1;  // tap L+l-i
                double theta = std::sqrt(dv[a] * rv[b]) + std::sqrt(rv[a] * dv[b]);
                inner += theta * theta;
            }
            num += phi[i - 1] * phi[i - 1] * inner;
        }
        num /= static_cast<double>(L) * static_cast<double>(L);
        out[k] = num / (N * psi * psi);
    }
    return out;
}

/// Asymptotic self-interference coefficient for ARake over a flat PDP,
/// as a function of the load factor rho = N_c / L.
inline double nu(double rho) {
    if (rho <= 0.0)
        throw std::domain_error("nu: load factor must be positive");
    if (rho <= 1.0) return (2.0 / 3.0) * (3.0 - 3.0 * rho + rho * rho);
    return 2.0 / (3.0 * rho);
}

struct LsaPrediction {
    double gamma_star_inf = 0.0;   // target SINR at Gamma = inf
    double rho = 0.0;              // N_c / L
    double nu_rho = 0.0;
    double z_inv_limit = 0.0;      // (K-1)/N
    double gamma_inv_limit = 0.0;  // nu(rho)/N
    bool feasible = false;
    double min_nf_interior = 0.0;  // gamma*_inf (K-1+nu)/N_c before ceiling
    std::size_t min_nf = 0;        // with the N_f >= 5 regulatory floor
    std::vector<double> predicted_powers;     // empty when infeasible
    std::vector<double> predicted_utilities;  // empty when infeasible
};

/// Closed-form equilibrium prediction for ARake over a flat PDP: per-user
/// powers and utilities from the large-system SINR balance, plus the minimum
/// number of frames that keeps the equilibrium feasible.
template <typename Eff>
LsaPrediction predict_equilibrium(const GameParams& params, const Eff& f,
                                  const std::vector<double>& h_sp) {
    const double N = static_cast<double>(params.processing_gain());
    const double K = static_cast<double>(params.users);

    LsaPrediction pred;
    pred.rho = params.load_factor();
    pred.nu_rho = nu(pred.rho);
    pred.gamma_star_inf =
        solve_target_sinr(f, std::numeric_limits<double>::infinity());
    pred.z_inv_limit = (K - 1.0) / N;
    pred.gamma_inv_limit = pred.nu_rho / N;

    double eff_load = K - 1.0 + pred.nu_rho;
    pred.min_nf_interior =
        pred.gamma_star_inf * eff_load / static_cast<double>(params.chips);
    pred.min_nf = std::max<std::size_t>(
        5, static_cast<std::size_t>(std::ceil(pred.min_nf_interior)));

    double margin = 1.0 - pred.gamma_star_inf * eff_load / N;
    pred.feasible = margin > 0.0;
    if (!pred.feasible) return pred;

    double overhead = static_cast<double>(params.info_bits) /
                      static_cast<double>(params.packet_bits);
    double fval = f.value(pred.gamma_star_inf);
    pred.predicted_powers.resize(h_sp.size());
    pred.predicted_utilities.resize(h_sp.size());
    for (std::size_t k = 0; k < h_sp.size(); ++k) {
        pred.predicted_powers[k] =
            params.noise_var_w * pred.gamma_star_inf / (h_sp[k] * margin);
        pred.predicted_utilities[k] =
            h_sp[k] * overhead * params.rate_bps * fval * margin /
            (params.noise_var_w * pred.gamma_star_inf);
    }
    return pred;
}

}  // namespace uwbpc
