#pragma once

#include <cstddef>
#include <stdexcept>

namespace uwbpc {

/// Static scenario parameters for the uplink power-control game.
struct GameParams {
    std::size_t users = 1;        // K
    std::size_t frames = 10;      // N_f, pulses per symbol
    std::size_t chips = 30;       // N_c, chip positions per frame
    std::size_t paths = 20;       // L, resolvable multipath taps
    int packet_bits = 100;        // M, total bits per packet
    int info_bits = 100;          // D, information bits per packet
    double rate_bps = 1e5;        // R
    double noise_var_w = 5e-16;   // sigma^2
    double p_max_w = 1e-6;
    double p_min_w = 0.0;

    // processing gain N = N_f * N_c
    std::size_t processing_gain() const { return frames * chips; }

    double load_factor() const {
        return static_cast<double>(chips) / static_cast<double>(paths);
    }

    void validate() const {
        if (users < 1 || frames < 1 || chips < 1 || paths < 1)
            throw std::invalid_argument("GameParams: all counts must be >= 1");
        if (packet_bits < 2)
            throw std::invalid_argument(
                "GameParams: packet_bits must be >= 2 so the efficiency "
                "function has f'(0) = 0");
        if (info_bits < 1 || info_bits > packet_bits)
            throw std::invalid_argument("GameParams: need 1 <= info_bits <= packet_bits");
        if (rate_bps <= 0.0)
            throw std::invalid_argument("GameParams: rate_bps must be positive");
        if (noise_var_w <= 0.0)
            throw std::invalid_argument("GameParams: noise_var_w must be positive");
        if (p_min_w < 0.0 || p_max_w < p_min_w)
            throw std::invalid_argument("GameParams: need 0 <= p_min_w <= p_max_w");
    }
};

}  // namespace uwbpc
