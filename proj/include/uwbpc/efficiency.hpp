#pragma once

#include <cmath>
#include <stdexcept>

namespace uwbpc {

/// Packet-success efficiency f(g) = (1 - e^{-g/2})^M. Increasing, S-shaped,
/// f(0) = 0, f(inf) = 1, f'(0) = 0 for M >= 2. Any model with the same shape
/// and the value/derivative/second_derivative interface plugs in.
struct PacketExpEfficiency {
    int packet_bits = 100;  // M

    explicit PacketExpEfficiency(int m = 100) : packet_bits(m) {
        if (m < 2)
            throw std::invalid_argument("PacketExpEfficiency: need M >= 2");
    }

    double value(double gamma) const {
        if (gamma < 0.0)
            throw std::domain_error("efficiency: negative SINR");
        double u = -std::expm1(-0.5 * gamma);  // 1 - e^{-g/2}
        return std::pow(u, packet_bits);
    }

    double derivative(double gamma) const {
        if (gamma < 0.0)
            throw std::domain_error("efficiency: negative SINR");
        double e = std::exp(-0.5 * gamma);
        double u = -std::expm1(-0.5 * gamma);
        return 0.5 * packet_bits * e * std::pow(u, packet_bits - 1);
    }

    double second_derivative(double gamma) const {
        if (gamma < 0.0)
            throw std::domain_error("efficiency: negative SINR");
        double e = std::exp(-0.5 * gamma);
        double u = -std::expm1(-0.5 * gamma);
        double m = static_cast<double>(packet_bits);
        return 0.25 * m * e * std::pow(u, packet_bits - 2) * ((m - 1.0) * e - u);
    }
};

}  // namespace uwbpc
