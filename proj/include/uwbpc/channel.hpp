#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uwbpc/params.hpp"
#include "uwbpc/rng.hpp"

namespace uwbpc {

enum class PdpKind { Flat, Exponential };

/// Second-order description of the multipath channel: per-tap power-delay
/// profile, large-scale pathloss/shadowing, and user distances.
struct ChannelModel {
    PdpKind pdp_kind = PdpKind::Flat;
    double decay_constant = 0.1;      // 1/paths, Exponential only
    double shadowing_sigma_db = 0.0;  // 0 disables lognormal shadowing
    double pathloss_exponent = 0.0;   // 0 disables distance pathloss
    double distance_min_m = 3.0;
    double distance_max_m = 20.0;
    std::vector<double> per_user_variance;  // sigma^2_k overrides, empty = 1

    void validate() const {
        if (pdp_kind == PdpKind::Exponential && decay_constant <= 0.0)
            throw std::invalid_argument("ChannelModel: decay_constant must be > 0");
        if (distance_min_m <= 0.0 || distance_min_m > distance_max_m)
            throw std::invalid_argument(
                "ChannelModel: need 0 < distance_min_m <= distance_max_m");
        if (shadowing_sigma_db < 0.0)
            throw std::invalid_argument("ChannelModel: shadowing_sigma_db must be >= 0");
        for (double v : per_user_variance)
            if (v <= 0.0)
                throw std::invalid_argument("ChannelModel: per_user_variance entries must be > 0");
    }

    double base_variance(std::size_t k) const {
        if (per_user_variance.empty()) return 1.0;
        return per_user_variance[k % per_user_variance.size()];
    }

    /// Per-tap variance profile normalized so the taps sum to L * sigma^2_k
    /// (total-power parity with the flat profile).
    std::vector<double> tap_variances(std::size_t k, std::size_t paths) const {
        std::vector<double> var(paths, base_variance(k));
        if (pdp_kind == PdpKind::Exponential) {
            double total = 0.0;
            for (std::size_t l = 0; l < paths; ++l) {
                var[l] = std::exp(-decay_constant * static_cast<double>(l));
                total += var[l];
            }
            double scale = base_variance(k) * static_cast<double>(paths) / total;
            for (double& v : var) v *= scale;
        }
        return var;
    }
};

/// One random draw of every user's channel. Immutable after construction.
struct ChannelRealization {
    // alpha[k][l]: real fading coefficient of tap l for user k
    std::vector<std::vector<double>> alpha;
    std::vector<std::size_t> delay_chips;  // Delta_k in {0,...,N-1}
    std::vector<double> distance_m;
    // std_profile[k][l] = sqrt(Var[alpha_k,l]) actually used for the draw
    std::vector<std::vector<double>> std_profile;
};

/// Squared Euclidean norm of user k's fading vector (channel gain h_k).
inline double channel_gain(const ChannelRealization& real, std::size_t k) {
    if (k >= real.alpha.size())
        throw std::out_of_range("channel_gain: user index out of range");
    double g = 0.0;
    for (double a : real.alpha[k]) g += a * a;
    return g;
}

/// Draws one channel realization. Deterministic in (model, params, seed);
/// per-user substreams keep users decoupled.
inline ChannelRealization draw_realization(const ChannelModel& model,
                                           const GameParams& params,
                                           std::uint64_t seed) {
    model.validate();
    params.validate();
    const std::size_t K = params.users;
    const std::size_t L = params.paths;
    const std::size_t N = params.processing_gain();

    ChannelRealization real;
    real.alpha.resize(K);
    real.delay_chips.resize(K);
    real.distance_m.resize(K);
    real.std_profile.resize(K);

    for (std::size_t k = 0; k < K; ++k) {
        CounterRng rng(seed, k);
        real.distance_m[k] = rng.uniform(model.distance_min_m, model.distance_max_m);
        real.delay_chips[k] =
            static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(N)));
        if (real.delay_chips[k] >= N) real.delay_chips[k] = N - 1;

        double large_scale = 1.0;
        if (model.pathloss_exponent > 0.0)
            large_scale *= std::pow(real.distance_m[k], -model.pathloss_exponent);
        if (model.shadowing_sigma_db > 0.0)
            large_scale *= std::pow(10.0, model.shadowing_sigma_db * rng.normal() / 10.0);

        std::vector<double> var = model.tap_variances(k, L);
        real.std_profile[k].resize(L);
        for (std::size_t l = 0; l < L; ++l)
            real.std_profile[k][l] = std::sqrt(var[l] * large_scale);

        real.alpha[k].resize(L);
        // reject the (probability-zero) all-zero draw
        for (int attempt = 0; attempt < 64; ++attempt) {
            double norm2 = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                real.alpha[k][l] = real.std_profile[k][l] * rng.normal();
                norm2 += real.alpha[k][l] * real.alpha[k][l];
            }
            if (norm2 > 0.0) break;
        }
        if (channel_gain(real, k) <= 0.0)
            throw std::runtime_error("draw_realization: degenerate all-zero channel");
    }
    return real;
}

}  // namespace uwbpc
