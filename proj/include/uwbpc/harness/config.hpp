#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uwbpc/brpc.hpp"
#include "uwbpc/channel.hpp"
#include "uwbpc/params.hpp"
#include "uwbpc/rake.hpp"

namespace uwbpc::harness {

enum class ExperimentKind {
    TableQ,
    UtilityVsGain,
    GammaStarCurve,
    OutageVsNf,
    NeVsSocial,
    Custom,
};

inline ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "table_q") return ExperimentKind::TableQ;
    if (s == "utility_vs_gain") return ExperimentKind::UtilityVsGain;
    if (s == "gamma_star_curve") return ExperimentKind::GammaStarCurve;
    if (s == "outage_vs_nf") return ExperimentKind::OutageVsNf;
    if (s == "ne_vs_social") return ExperimentKind::NeVsSocial;
    if (s == "custom") return ExperimentKind::Custom;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

inline const char* to_string(ExperimentKind e) {
    switch (e) {
        case ExperimentKind::TableQ: return "table_q";
        case ExperimentKind::UtilityVsGain: return "utility_vs_gain";
        case ExperimentKind::GammaStarCurve: return "gamma_star_curve";
        case ExperimentKind::OutageVsNf: return "outage_vs_nf";
        case ExperimentKind::NeVsSocial: return "ne_vs_social";
        case ExperimentKind::Custom: return "custom";
    }
    return "?";
}

struct Scenario {
    int schema_version = 1;
    std::string name = "scenario";
    GameParams params;
    ChannelModel model;
    RakeConfig rake;
    BrpcConfig brpc;
    ExperimentKind experiment = ExperimentKind::Custom;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    std::vector<std::size_t> nf_range;  // outage_vs_nf
    std::vector<double> rho_range;      // ne_vs_social
    bool dump_trace = false;            // custom: write <name>.trace.csv

    void validate() const {
        params.validate();
        model.validate();
        rake.validate(params.paths);
        brpc.validate();
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (experiment == ExperimentKind::OutageVsNf && nf_range.empty())
            throw std::invalid_argument("outage_vs_nf requires a non-empty nf_range");
        if (experiment == ExperimentKind::NeVsSocial && rho_range.empty())
            throw std::invalid_argument("ne_vs_social requires a non-empty rho_range");
    }
};

namespace detail {

// FNV-1a over the canonical (sorted-key, no-whitespace) config dump.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const Scenario& sc) {
    nlohmann::json j;
    j["schema_version"] = sc.schema_version;
    j["name"] = sc.name;
    j["experiment"] = to_string(sc.experiment);
    j["trials"] = sc.trials;
    j["seed"] = sc.seed;
    j["output_dir"] = sc.output_dir;
    j["params"] = {
        {"users", sc.params.users},        {"frames", sc.params.frames},
        {"chips", sc.params.chips},        {"paths", sc.params.paths},
        {"packet_bits", sc.params.packet_bits},
        {"info_bits", sc.params.info_bits},
        {"rate_bps", sc.params.rate_bps},  {"noise_var_w", sc.params.noise_var_w},
        {"p_max_w", sc.params.p_max_w},    {"p_min_w", sc.params.p_min_w},
    };
    j["channel"] = {
        {"pdp", sc.model.pdp_kind == PdpKind::Flat ? "flat" : "exponential"},
        {"decay", sc.model.decay_constant},
        {"shadowing_sigma_db", sc.model.shadowing_sigma_db},
        {"pathloss_exponent", sc.model.pathloss_exponent},
        {"distance_min_m", sc.model.distance_min_m},
        {"distance_max_m", sc.model.distance_max_m},
    };
    if (!sc.model.per_user_variance.empty())
        j["channel"]["per_user_variance"] = sc.model.per_user_variance;
    j["rake"] = {
        {"kind", sc.rake.kind == RakeKind::ARake
                     ? "arake"
                     : (sc.rake.kind == RakeKind::PRake ? "prake" : "srake")},
        {"fingers", sc.rake.fingers},
    };
    j["brpc"] = {
        {"max_sweeps", sc.brpc.max_sweeps},
        {"tol_power_rel", sc.brpc.tol_power_rel},
        {"init", sc.brpc.init == BrpcInit::ZeroPlusEps ? "zero_plus_eps"
                                                       : "uniform_random"},
        {"update", sc.brpc.update_form == BrpcUpdate::Distributed ? "distributed"
                                                                  : "direct"},
    };
    if (!sc.nf_range.empty()) j["nf_range"] = sc.nf_range;
    if (!sc.rho_range.empty()) j["rho_range"] = sc.rho_range;
    j["dump_trace"] = sc.dump_trace;
    return j;
}

inline std::uint64_t scenario_hash(const Scenario& sc) {
    nlohmann::json j = to_json(sc);
    j.erase("output_dir");  // where results land does not change what they are
    return detail::fnv1a(j.dump());
}

inline Scenario parse_scenario(const nlohmann::json& j) {
    Scenario sc;
    if (!j.contains("schema_version"))
        throw std::invalid_argument("config missing required field 'schema_version'");
    sc.schema_version = j.at("schema_version").get<int>();
    if (sc.schema_version != 1)
        throw std::invalid_argument("unsupported schema_version (expected 1)");
    sc.name = detail::get_or<std::string>(j, "name", "scenario");
    if (!j.contains("experiment"))
        throw std::invalid_argument("config missing required field 'experiment'");
    sc.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    sc.trials = detail::get_or<std::size_t>(j, "trials", 1);
    sc.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
    sc.output_dir = detail::get_or<std::string>(j, "output_dir", ".");
    sc.dump_trace = detail::get_or<bool>(j, "dump_trace", false);

    if (j.contains("params")) {
        const auto& p = j.at("params");
        sc.params.users = detail::get_or<std::size_t>(p, "users", sc.params.users);
        sc.params.frames = detail::get_or<std::size_t>(p, "frames", sc.params.frames);
        sc.params.chips = detail::get_or<std::size_t>(p, "chips", sc.params.chips);
        sc.params.paths = detail::get_or<std::size_t>(p, "paths", sc.params.paths);
        sc.params.packet_bits = detail::get_or<int>(p, "packet_bits", sc.params.packet_bits);
        sc.params.info_bits = detail::get_or<int>(p, "info_bits", sc.params.info_bits);
        sc.params.rate_bps = detail::get_or<double>(p, "rate_bps", sc.params.rate_bps);
        sc.params.noise_var_w = detail::get_or<double>(p, "noise_var_w", sc.params.noise_var_w);
        sc.params.p_max_w = detail::get_or<double>(p, "p_max_w", sc.params.p_max_w);
        sc.params.p_min_w = detail::get_or<double>(p, "p_min_w", sc.params.p_min_w);
    }
    if (j.contains("channel")) {
        const auto& c = j.at("channel");
        std::string pdp = detail::get_or<std::string>(c, "pdp", "flat");
        if (pdp == "flat")
            sc.model.pdp_kind = PdpKind::Flat;
        else if (pdp == "exponential")
            sc.model.pdp_kind = PdpKind::Exponential;
        else
            throw std::invalid_argument("channel.pdp must be 'flat' or 'exponential'");
        sc.model.decay_constant = detail::get_or<double>(c, "decay", sc.model.decay_constant);
        sc.model.shadowing_sigma_db =
            detail::get_or<double>(c, "shadowing_sigma_db", sc.model.shadowing_sigma_db);
        sc.model.pathloss_exponent =
            detail::get_or<double>(c, "pathloss_exponent", sc.model.pathloss_exponent);
        sc.model.distance_min_m =
            detail::get_or<double>(c, "distance_min_m", sc.model.distance_min_m);
        sc.model.distance_max_m =
            detail::get_or<double>(c, "distance_max_m", sc.model.distance_max_m);
        if (c.contains("per_user_variance"))
            sc.model.per_user_variance = c.at("per_user_variance").get<std::vector<double>>();
    }
    if (j.contains("rake")) {
        const auto& r = j.at("rake");
        std::string kind = detail::get_or<std::string>(r, "kind", "arake");
        if (kind == "arake")
            sc.rake.kind = RakeKind::ARake;
        else if (kind == "prake")
            sc.rake.kind = RakeKind::PRake;
        else if (kind == "srake")
            sc.rake.kind = RakeKind::SRake;
        else
            throw std::invalid_argument("rake.kind must be arake, prake or srake");
        sc.rake.fingers = detail::get_or<std::size_t>(r, "fingers", sc.rake.fingers);
    }
    if (j.contains("brpc")) {
        const auto& b = j.at("brpc");
        sc.brpc.max_sweeps = detail::get_or<std::size_t>(b, "max_sweeps", sc.brpc.max_sweeps);
        sc.brpc.tol_power_rel =
            detail::get_or<double>(b, "tol_power_rel", sc.brpc.tol_power_rel);
        std::string init = detail::get_or<std::string>(b, "init", "zero_plus_eps");
        if (init == "zero_plus_eps")
            sc.brpc.init = BrpcInit::ZeroPlusEps;
        else if (init == "uniform_random")
            sc.brpc.init = BrpcInit::UniformRandom;
        else
            throw std::invalid_argument("brpc.init must be zero_plus_eps or uniform_random");
        std::string upd = detail::get_or<std::string>(b, "update", "distributed");
        if (upd == "distributed")
            sc.brpc.update_form = BrpcUpdate::Distributed;
        else if (upd == "direct")
            sc.brpc.update_form = BrpcUpdate::Direct;
        else
            throw std::invalid_argument("brpc.update must be distributed or direct");
    }
    if (j.contains("nf_range"))
        sc.nf_range = j.at("nf_range").get<std::vector<std::size_t>>();
    if (j.contains("rho_range"))
        sc.rho_range = j.at("rho_range").get<std::vector<double>>();

    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse_scenario(j);
}

}  // namespace uwbpc::harness
