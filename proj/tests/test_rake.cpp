#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "uwbpc/uwbpc.hpp"

using namespace uwbpc;

namespace {

ChannelRealization fixed_channel(std::vector<std::vector<double>> alpha) {
    ChannelRealization real;
    real.alpha = std::move(alpha);
    return real;
}

}  // namespace

TEST_CASE("combining weights per receiver kind") {
    ChannelRealization real = fixed_channel({{1.0, -2.0, 3.0}});

    CHECK(build_weights(real, {RakeKind::ARake, 0}, 0) ==
          std::vector<double>{1.0, -2.0, 3.0});
    CHECK(build_weights(real, {RakeKind::PRake, 2}, 0) ==
          std::vector<double>{1.0, -2.0, 0.0});
    CHECK(build_weights(real, {RakeKind::SRake, 2}, 0) ==
          std::vector<double>{0.0, -2.0, 3.0});

    SECTION("SRake ties break toward the lower tap index") {
        ChannelRealization tie = fixed_channel({{2.0, -2.0, 1.0}});
        CHECK(build_weights(tie, {RakeKind::SRake, 1}, 0) ==
              std::vector<double>{2.0, 0.0, 0.0});
    }

    SECTION("finger count out of range is rejected") {
        CHECK_THROWS_AS(build_weights(real, {RakeKind::PRake, 4}, 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_weights(real, {RakeKind::SRake, 0}, 0),
                        std::invalid_argument);
    }
}

TEST_CASE("L=1 collapses to flat fading") {
    GameParams params;
    params.users = 3;
    params.paths = 1;
    params.frames = 5;
    params.chips = 10;
    ChannelRealization real = fixed_channel({{1.5}, {-0.5}, {2.0}});
    GainSet g = compute_gains(real, {RakeKind::ARake, 0}, params);
    const double N = 50.0;
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(g.h_si[k] == 0.0);
        CHECK(g.gamma_cap[k] == std::numeric_limits<double>::infinity());
    }
    // h_mai[k][j] = alpha_j^2 / N
    CHECK(g.mai(0, 1) == Catch::Approx(0.25 / N));
    CHECK(g.mai(0, 2) == Catch::Approx(4.0 / N));
    CHECK(g.mai(1, 2) == Catch::Approx(4.0 / N));
    // with Gamma = inf, the (1 - g/Gamma) factor must be exactly 1
    CHECK(1.0 - 5.0 / g.gamma_cap[0] == 1.0);
}

TEST_CASE("ARake signal gain is the squared channel norm") {
    GameParams params;
    params.users = 2;
    params.paths = 20;
    ChannelModel model;
    ChannelRealization real = draw_realization(model, params, 11);
    GainSet g = compute_gains(real, {RakeKind::ARake, 0}, params);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(g.h_sp[k] == Catch::Approx(channel_gain(real, k)).epsilon(1e-14));
}

TEST_CASE("gains match the dense-matrix oracle") {
    GameParams params;
    params.users = 8;
    params.paths = 20;
    params.chips = 30;
    params.frames = 10;
    ChannelModel model;
    model.pathloss_exponent = 2.0;

    for (auto cfg : {RakeConfig{RakeKind::ARake, 0}, RakeConfig{RakeKind::PRake, 7},
                     RakeConfig{RakeKind::SRake, 12}}) {
        ChannelRealization real = draw_realization(model, params, 99);
        GainSet fast = compute_gains(real, cfg, params);
        oracle::DenseGains slow = oracle::dense_gains(real, cfg, params);
        for (std::size_t k = 0; k < params.users; ++k) {
            CHECK(fast.h_sp[k] == Catch::Approx(slow.h_sp[k]).epsilon(1e-12));
            CHECK(fast.h_si[k] == Catch::Approx(slow.h_si[k]).epsilon(1e-12));
            for (std::size_t j = 0; j < params.users; ++j)
                if (j != k)
                    CHECK(fast.mai(k, j) ==
                          Catch::Approx(slow.h_mai[k][j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("Gamma_k >= 1 over many ARake draws") {
    GameParams params;
    params.users = 2;
    params.paths = 12;
    params.chips = 20;
    params.frames = 6;
    ChannelModel model;
    for (std::size_t d = 0; d < 10000; ++d) {
        ChannelRealization real = draw_realization(model, params, d);
        GainSet g = compute_gains(real, {RakeKind::ARake, 0}, params);
        for (std::size_t k = 0; k < params.users; ++k) {
            REQUIRE(g.gamma_cap[k] >= 1.0);
            REQUIRE(g.h_sp[k] > 0.0);
            REQUIRE(g.h_si[k] >= 0.0);
        }
    }
}

TEST_CASE("homogeneity degrees under per-user scaling") {
    GameParams params;
    params.users = 3;
    params.paths = 15;
    params.chips = 25;
    params.frames = 8;
    ChannelModel model;
    ChannelRealization real = draw_realization(model, params, 5);
    RakeConfig cfg{RakeKind::ARake, 0};
    GainSet base = compute_gains(real, cfg, params);

    const double c = 1.7;
    SECTION("scaling user k scales h_sp and h_si by c^2, leaves Gamma fixed") {
        ChannelRealization scaled = real;
        for (double& a : scaled.alpha[0]) a *= c;
        GainSet g = compute_gains(scaled, cfg, params);
        CHECK(g.h_sp[0] == Catch::Approx(c * c * base.h_sp[0]).epsilon(1e-12));
        CHECK(g.h_si[0] == Catch::Approx(c * c * base.h_si[0]).epsilon(1e-12));
        CHECK(g.gamma_cap[0] == Catch::Approx(base.gamma_cap[0]).epsilon(1e-12));
    }
    SECTION("scaling interferer j scales h_mai[k][j] by c^2") {
        ChannelRealization scaled = real;
        for (double& a : scaled.alpha[1]) a *= c;
        GainSet g = compute_gains(scaled, cfg, params);
        CHECK(g.mai(0, 1) == Catch::Approx(c * c * base.mai(0, 1)).epsilon(1e-12));
        CHECK(g.mai(2, 1) == Catch::Approx(c * c * base.mai(2, 1)).epsilon(1e-12));
    }
}

TEST_CASE("permuting user labels permutes the gain set consistently") {
    GameParams params;
    params.users = 4;
    params.paths = 10;
    params.chips = 15;
    params.frames = 5;
    ChannelModel model;
    ChannelRealization real = draw_realization(model, params, 21);
    RakeConfig cfg{RakeKind::ARake, 0};
    GainSet base = compute_gains(real, cfg, params);

    // swap users 1 and 3
    ChannelRealization swapped = real;
    std::swap(swapped.alpha[1], swapped.alpha[3]);
    GainSet g = compute_gains(swapped, cfg, params);
    auto m = [](std::size_t u) { return u == 1 ? 3 : (u == 3 ? 1 : u); };
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(g.h_sp[k] == Catch::Approx(base.h_sp[m(k)]).epsilon(1e-14));
        CHECK(g.h_si[k] == Catch::Approx(base.h_si[m(k)]).epsilon(1e-14));
        for (std::size_t j = 0; j < 4; ++j)
            if (j != k)
                CHECK(g.mai(k, j) ==
                      Catch::Approx(base.mai(m(k), m(j))).epsilon(1e-14));
    }
}
