#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "uwbpc/uwbpc.hpp"

using namespace uwbpc;

TEST_CASE("nu closed form") {
    CHECK(nu(5.0 / 3.0) == Catch::Approx(0.4).epsilon(1e-14));
    CHECK(nu(0.5) == Catch::Approx(7.0 / 6.0).margin(1e-12));
    // continuity at the branch point
    CHECK((2.0 / 3.0) * (3.0 - 3.0 + 1.0) == Catch::Approx(2.0 / 3.0));
    CHECK(nu(1.0) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(nu(1.0 + 1e-12) == Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK_THROWS_AS(nu(0.0), std::domain_error);
    CHECK_THROWS_AS(nu(-1.0), std::domain_error);

    // strictly decreasing on a grid
    double prev = nu(0.05);
    for (double rho = 0.1; rho <= 6.0; rho += 0.05) {
        double v = nu(rho);
        REQUIRE(v < prev);
        prev = v;
    }
}

TEST_CASE("asymptotic limits: flat PDP, ARake closed forms") {
    GameParams params;
    params.users = 8;
    params.frames = 10;
    params.chips = 100;
    params.paths = 200;  // rho = 0.5
    ChannelModel model;

    VarianceProfiles vp = make_profiles(model, params, {RakeKind::ARake, 0});
    const double N = static_cast<double>(params.processing_gain());

    std::vector<double> z = limit_z_inv(vp, params);
    std::vector<double> g = limit_gamma_inv(vp, params);
    for (std::size_t k = 0; k < params.users; ++k) {
        CHECK(z[k] * N == Catch::Approx(7.0).epsilon(0.01));
        CHECK(g[k] * N == Catch::Approx(nu(0.5)).epsilon(0.01));
    }

    SECTION("large-scale statistics drop out") {
        ChannelModel scaled = model;
        scaled.per_user_variance = {1.0, 4.0, 0.25, 9.0, 1.0, 2.0, 0.5, 7.0};
        VarianceProfiles vp2 = make_profiles(scaled, params, {RakeKind::ARake, 0});
        std::vector<double> z2 = limit_z_inv(vp2, params);
        std::vector<double> g2 = limit_gamma_inv(vp2, params);
        for (std::size_t k = 0; k < params.users; ++k) {
            CHECK(z2[k] == Catch::Approx(z[k]).epsilon(1e-12));
            CHECK(g2[k] == Catch::Approx(g[k]).epsilon(1e-12));
        }
    }

    SECTION("K = 1 has no MAI") {
        GameParams solo = params;
        solo.users = 1;
        VarianceProfiles vp1 = make_profiles(model, solo, {RakeKind::ARake, 0});
        CHECK(limit_z_inv(vp1, solo)[0] == 0.0);
    }

    SECTION("L = 1 has no self-interference") {
        GameParams flat = params;
        flat.paths = 1;
        VarianceProfiles vp1 = make_profiles(model, flat, {RakeKind::ARake, 0});
        CHECK(limit_gamma_inv(vp1, flat)[0] == 0.0);
    }
}

TEST_CASE("finite-L limits approach the asymptote monotonically") {
    GameParams params;
    params.users = 8;
    params.frames = 10;
    ChannelModel model;
    double prev_z = 1e9, prev_g = 1e9;
    for (std::size_t L : {10u, 50u, 200u, 800u}) {
        params.paths = L;
        params.chips = L / 2;  // rho fixed at 0.5
        VarianceProfiles vp = make_profiles(model, params, {RakeKind::ARake, 0});
        double N = static_cast<double>(params.processing_gain());
        double dz = std::fabs(limit_z_inv(vp, params)[0] * N - 7.0);
        double dg = std::fabs(limit_gamma_inv(vp, params)[0] * N - nu(0.5));
        CHECK(dz < prev_z);
        CHECK(dg < prev_g);
        prev_z = dz;
        prev_g = dg;
    }
    CHECK(prev_z / 7.0 < 0.01);
    CHECK(prev_g / nu(0.5) < 0.01);
}

TEST_CASE("exponential PDP: limits match Monte-Carlo means of exact ratios") {
    GameParams params;
    params.users = 4;
    params.frames = 10;
    params.chips = 100;
    params.paths = 200;
    ChannelModel model;
    model.pdp_kind = PdpKind::Exponential;
    model.decay_constant = 0.02;

    VarianceProfiles vp = make_profiles(model, params, {RakeKind::ARake, 0});
    std::vector<double> z_lim = limit_z_inv(vp, params);
    std::vector<double> g_lim = limit_gamma_inv(vp, params);

    const std::size_t draws = 500;
    double z_mc = 0.0, g_mc = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        ChannelRealization real = draw_realization(model, params, 5000 + d);
        GainSet g = compute_gains(real, {RakeKind::ARake, 0}, params);
        z_mc += g.z_inv[0] / draws;
        g_mc += (1.0 / g.gamma_cap[0]) / draws;
    }
    CHECK(z_mc == Catch::Approx(z_lim[0]).epsilon(0.05));
    CHECK(g_mc == Catch::Approx(g_lim[0]).epsilon(0.05));
}

TEST_CASE("PRake profiles zero the unused fingers") {
    GameParams params;
    params.users = 2;
    params.frames = 10;
    params.chips = 30;
    params.paths = 10;
    ChannelModel model;
    VarianceProfiles vp = make_profiles(model, params, {RakeKind::PRake, 4});
    for (std::size_t l = 0; l < 4; ++l)
        CHECK(vp.rake_var[0][l] == vp.path_var[0][l]);
    for (std::size_t l = 4; l < 10; ++l) CHECK(vp.rake_var[0][l] == 0.0);

    SECTION("ARake profiles from a realization match the recorded std devs") {
        ChannelRealization real = draw_realization(model, params, 3);
        VarianceProfiles vr = make_profiles(real, {RakeKind::ARake, 0});
        for (std::size_t l = 0; l < 10; ++l) {
            CHECK(vr.path_var[0][l] ==
                  Catch::Approx(real.std_profile[0][l] * real.std_profile[0][l]));
            CHECK(vr.rake_var[0][l] == vr.path_var[0][l]);
        }
    }

    SECTION("SRake is refused") {
        CHECK_THROWS_AS(make_profiles(model, params, {RakeKind::SRake, 4}),
                        std::invalid_argument);
    }
}

TEST_CASE("equilibrium prediction closed forms") {
    PacketExpEfficiency f(100);

    SECTION("minimum frames for the many-user scenario") {
        GameParams params;
        params.users = 32;
        params.chips = 50;
        params.paths = 100;
        params.frames = 9;
        LsaPrediction pred = predict_equilibrium(params, f, {1.0});
        CHECK(pred.min_nf_interior > 8.2);
        CHECK(pred.min_nf_interior < 8.4);
        CHECK(pred.min_nf == 9);
    }

    SECTION("regulatory floor keeps min_nf at 5") {
        GameParams params;
        params.users = 2;
        params.chips = 100;
        params.paths = 50;
        params.frames = 10;
        LsaPrediction pred = predict_equilibrium(params, f, {1.0});
        CHECK(pred.min_nf_interior < 1.0);
        CHECK(pred.min_nf == 5);
    }

    SECTION("utility is linear in the signal gain") {
        GameParams params;
        params.users = 16;
        params.chips = 100;
        params.paths = 60;
        params.frames = 10;
        LsaPrediction pred = predict_equilibrium(params, f, {1.0, 2.0});
        REQUIRE(pred.feasible);
        CHECK(pred.predicted_utilities[1] ==
              Catch::Approx(2.0 * pred.predicted_utilities[0]).epsilon(1e-14));
        CHECK(pred.predicted_powers[1] ==
              Catch::Approx(0.5 * pred.predicted_powers[0]).epsilon(1e-14));
    }

    SECTION("infeasible load sets the flag and omits predictions") {
        GameParams params;
        params.users = 64;
        params.chips = 10;
        params.paths = 10;
        params.frames = 2;
        LsaPrediction pred = predict_equilibrium(params, f, {1.0});
        CHECK_FALSE(pred.feasible);
        CHECK(pred.predicted_powers.empty());
        CHECK(pred.predicted_utilities.empty());
    }
}
