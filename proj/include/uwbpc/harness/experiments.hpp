#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "uwbpc/harness/config.hpp"
#include "uwbpc/uwbpc.hpp"

namespace uwbpc::harness {

namespace detail {

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    return uwbpc::detail::mix64(uwbpc::detail::mix64(seed) ^
                                (0x9e3779b97f4a7c15ULL * (trial + 1)));
}

// Worker pool over trials. Results are stored by trial index, so output
// order never depends on scheduling; per-trial RNG substreams make the
// values themselves schedule-independent too.
template <typename Fn>
void parallel_trials(std::size_t trials, Fn&& fn) {
    std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, trials);
    if (workers <= 1) {
        for (std::size_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
                fn(t);
        });
    for (auto& th : pool) th.join();
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const Scenario& sc,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_)
            throw std::runtime_error("cannot open output file: " + path.string());
        out_ << "# uwbpc.csv.v1 scenario=" << sc.name
             << " hash=" << hash_hex(scenario_hash(sc)) << " seed=" << sc.seed
             << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// h_si and h_mai carry the 1/N spreading factor; with N_c fixed, switching
// N_f only rescales them. Gains computed once at frames=1 serve every N_f.
inline GainSet rescale_frames(GainSet g, std::size_t frames) {
    double inv = 1.0 / static_cast<double>(frames);
    for (double& v : g.h_si) v *= inv;
    for (double& v : g.h_mai) v *= inv;
    for (double& v : g.z_inv) v *= inv;
    for (std::size_t k = 0; k < g.h_sp.size(); ++k)
        g.gamma_cap[k] = g.h_si[k] > 0.0
                             ? g.h_sp[k] / g.h_si[k]
                             : std::numeric_limits<double>::infinity();
    return g;
}

}  // namespace detail

struct RunResult {
    std::filesystem::path csv_path;
    std::filesystem::path summary_path;
    std::filesystem::path trace_path;  // empty unless written
    nlohmann::json summary;
};

inline nlohmann::json base_summary(const Scenario& sc) {
    nlohmann::json s;
    s["scenario"] = to_json(sc);
    s["scenario_hash"] = detail::hash_hex(scenario_hash(sc));
    PacketExpEfficiency f(sc.params.packet_bits);
    LsaPrediction pred = predict_equilibrium(sc.params, f, {1.0});
    s["lsa"] = {
        {"gamma_star_inf", pred.gamma_star_inf},
        {"gamma_star_inf_db", 10.0 * std::log10(pred.gamma_star_inf)},
        {"rho", pred.rho},
        {"nu_rho", pred.nu_rho},
        {"z_inv_limit", pred.z_inv_limit},
        {"gamma_inv_limit", pred.gamma_inv_limit},
        {"feasible", pred.feasible},
        {"min_nf_interior", pred.min_nf_interior},
        {"min_nf", pred.min_nf},
    };
    return s;
}

inline RunResult experiment_table_q(const Scenario& sc,
                                    const std::filesystem::path& out_dir) {
    const std::size_t K = sc.params.users;
    PacketExpEfficiency f(sc.params.packet_bits);
    struct TrialOut {
        std::vector<double> q;
        bool feasible = false;
    };
    std::vector<TrialOut> results(sc.trials);
    detail::parallel_trials(sc.trials, [&](std::size_t t) {
        ChannelRealization real =
            draw_realization(sc.model, sc.params, detail::trial_seed(sc.seed, t));
        GainSet gains = compute_gains(real, sc.rake, sc.params);
        FeasibilityResult fr = check_feasibility(gains, sc.params, f);
        TrialOut& o = results[t];
        o.feasible = fr.feasible;
        if (fr.feasible) {
            o.q.resize(K);
            for (std::size_t k = 0; k < K; ++k)
                o.q[k] = gains.h_sp[k] * (*fr.min_powers)[k];
        }
    });

    detail::CsvWriter csv(out_dir / (sc.name + ".csv"), sc,
                          {"seed", "trial", "scenario_hash", "user", "feasible", "q_w"});
    std::string hash = detail::hash_hex(scenario_hash(sc));
    std::vector<double> pooled;
    std::size_t infeasible = 0;
    for (std::size_t t = 0; t < sc.trials; ++t) {
        if (!results[t].feasible) ++infeasible;
        for (std::size_t k = 0; k < K; ++k) {
            double q = results[t].feasible ? results[t].q[k]
                                           : std::numeric_limits<double>::quiet_NaN();
            if (results[t].feasible) pooled.push_back(q);
            csv.row({std::to_string(sc.seed), std::to_string(t), hash,
                     std::to_string(k), results[t].feasible ? "1" : "0",
                     detail::fmt(q)});
        }
    }

    RunResult rr;
    rr.summary = base_summary(sc);
    double m = detail::mean(pooled);
    double v = detail::variance(pooled);
    rr.summary["q_mean"] = m;
    rr.summary["q_var"] = v;
    rr.summary["q_var_over_mean_sq"] = m != 0.0 ? v / (m * m) : 0.0;
    rr.summary["infeasible_trials"] = infeasible;
    return rr;
}

inline RunResult experiment_utility_vs_gain(const Scenario& sc,
                                            const std::filesystem::path& out_dir) {
    const std::size_t K = sc.params.users;
    PacketExpEfficiency f(sc.params.packet_bits);
    struct TrialOut {
        std::vector<double> h, u_sim, u_pred, p_sim, p_pred, sinr, target;
        std::vector<char> clipped;
        bool converged = false;
    };
    std::vector<TrialOut> results(sc.trials);
    detail::parallel_trials(sc.trials, [&](std::size_t t) {
        ChannelRealization real =
            draw_realization(sc.model, sc.params, detail::trial_seed(sc.seed, t));
        GainSet gains = compute_gains(real, sc.rake, sc.params);
        auto [ne, trace] = run_brpc(gains, sc.params, f, sc.brpc);
        LsaPrediction pred = predict_equilibrium(sc.params, f, gains.h_sp);
        TrialOut& o = results[t];
        o.converged = ne.converged;
        o.h.resize(K);
        for (std::size_t k = 0; k < K; ++k) o.h[k] = channel_gain(real, k);
        o.u_sim = ne.utilities;
        o.p_sim = ne.powers;
        o.sinr = ne.sinrs;
        o.target = ne.target_sinr;
        o.clipped.assign(K, 0);
        for (std::size_t k = 0; k < K; ++k) o.clipped[k] = ne.clipped[k] ? 1 : 0;
        if (pred.feasible) {
            o.u_pred = pred.predicted_utilities;
            o.p_pred = pred.predicted_powers;
        } else {
            o.u_pred.assign(K, std::numeric_limits<double>::quiet_NaN());
            o.p_pred.assign(K, std::numeric_limits<double>::quiet_NaN());
        }
    });

    detail::CsvWriter csv(
        out_dir / (sc.name + ".csv"), sc,
        {"seed", "trial", "scenario_hash", "user", "channel_gain", "power_sim_w",
         "power_lsa_w", "utility_sim_bpj", "utility_lsa_bpj", "sinr", "target_sinr",
         "clipped", "converged"});
    std::string hash = detail::hash_hex(scenario_hash(sc));
    std::vector<double> rel_dev;
    for (std::size_t t = 0; t < sc.trials; ++t) {
        const TrialOut& o = results[t];
        for (std::size_t k = 0; k < K; ++k) {
            if (std::isfinite(o.u_pred[k]) && o.u_pred[k] > 0.0 && !o.clipped[k])
                rel_dev.push_back(std::fabs(o.u_sim[k] - o.u_pred[k]) / o.u_pred[k]);
            csv.row({std::to_string(sc.seed), std::to_string(t), hash,
                     std::to_string(k), detail::fmt(o.h[k]), detail::fmt(o.p_sim[k]),
                     detail::fmt(o.p_pred[k]), detail::fmt(o.u_sim[k]),
                     detail::fmt(o.u_pred[k]), detail::fmt(o.sinr[k]),
                     detail::fmt(o.target[k]), o.clipped[k] ? "1" : "0",
                     o.converged ? "1" : "0"});
        }
    }

    RunResult rr;
    rr.summary = base_summary(sc);
    rr.summary["median_rel_utility_deviation"] = detail::median(rel_dev);
    rr.summary["compared_points"] = rel_dev.size();
    return rr;
}

inline RunResult experiment_gamma_star_curve(const Scenario& sc,
                                             const std::filesystem::path& out_dir) {
    PacketExpEfficiency f(sc.params.packet_bits);
    detail::CsvWriter csv(out_dir / (sc.name + ".csv"), sc,
                          {"seed", "trial", "scenario_hash", "gamma_cap_db",
                           "gamma_star", "gamma_star_db"});
    std::string hash = detail::hash_hex(scenario_hash(sc));
    for (double cap_db = 0.5; cap_db <= 60.0; cap_db += 0.5) {
        double cap = std::pow(10.0, cap_db / 10.0);
        if (cap < 1.0) continue;
        double gs = solve_target_sinr(f, cap);
        csv.row({std::to_string(sc.seed), "0", hash, detail::fmt(cap_db),
                 detail::fmt(gs), detail::fmt(10.0 * std::log10(gs))});
    }
    double gs_inf = solve_target_sinr(f, std::numeric_limits<double>::infinity());
    csv.row({std::to_string(sc.seed), "0", hash, "inf", detail::fmt(gs_inf),
             detail::fmt(10.0 * std::log10(gs_inf))});

    RunResult rr;
    rr.summary = base_summary(sc);
    rr.summary["gamma_star_inf"] = gs_inf;
    rr.summary["gamma_star_inf_db"] = 10.0 * std::log10(gs_inf);
    return rr;
}

inline RunResult experiment_outage_vs_nf(const Scenario& sc,
                                         const std::filesystem::path& out_dir) {
    const std::size_t K = sc.params.users;
    PacketExpEfficiency f(sc.params.packet_bits);

    GameParams base = sc.params;
    base.frames = 1;
    struct TrialOut {
        std::vector<char> any_clipped;     // per nf index
        std::vector<std::size_t> n_clipped;
    };
    std::vector<TrialOut> results(sc.trials);
    detail::parallel_trials(sc.trials, [&](std::size_t t) {
        ChannelRealization real =
            draw_realization(sc.model, base, detail::trial_seed(sc.seed, t));
        GainSet unit = compute_gains(real, sc.rake, base);
        TrialOut& o = results[t];
        o.any_clipped.resize(sc.nf_range.size());
        o.n_clipped.resize(sc.nf_range.size());
        for (std::size_t i = 0; i < sc.nf_range.size(); ++i) {
            GainSet gains = detail::rescale_frames(unit, sc.nf_range[i]);
            GameParams p = sc.params;
            p.frames = sc.nf_range[i];
            auto cfg = sc.brpc;
            cfg.record_trace = false;
            auto [ne, trace] = run_brpc(gains, p, f, cfg);
            std::size_t n = 0;
            for (std::size_t k = 0; k < K; ++k)
                if (ne.clipped[k]) ++n;
            o.n_clipped[i] = n;
            o.any_clipped[i] = n > 0 ? 1 : 0;
        }
    });

    detail::CsvWriter csv(out_dir / (sc.name + ".csv"), sc,
                          {"seed", "trial", "scenario_hash", "n_f", "any_clipped",
                           "n_clipped"});
    std::string hash = detail::hash_hex(scenario_hash(sc));
    std::vector<double> outage(sc.nf_range.size(), 0.0);
    for (std::size_t t = 0; t < sc.trials; ++t)
        for (std::size_t i = 0; i < sc.nf_range.size(); ++i) {
            outage[i] += results[t].any_clipped[i];
            csv.row({std::to_string(sc.seed), std::to_string(t), hash,
                     std::to_string(sc.nf_range[i]),
                     results[t].any_clipped[i] ? "1" : "0",
                     std::to_string(results[t].n_clipped[i])});
        }
    for (double& v : outage) v /= static_cast<double>(sc.trials);

    RunResult rr;
    rr.summary = base_summary(sc);
    nlohmann::json po = nlohmann::json::array();
    for (std::size_t i = 0; i < sc.nf_range.size(); ++i)
        po.push_back({{"n_f", sc.nf_range[i]}, {"outage_probability", outage[i]}});
    rr.summary["outage_vs_nf"] = po;
    return rr;
}

inline RunResult experiment_ne_vs_social(const Scenario& sc,
                                         const std::filesystem::path& out_dir) {
    PacketExpEfficiency f(sc.params.packet_bits);
    auto run_ne = [&](const GainSet& gains, const GameParams& p,
                      const PacketExpEfficiency& eff) {
        auto cfg = sc.brpc;
        cfg.record_trace = false;
        return run_brpc(gains, p, eff, cfg).first;
    };

    detail::CsvWriter csv(
        out_dir / (sc.name + ".csv"), sc,
        {"seed", "trial", "scenario_hash", "rho", "paths", "mean_norm_utility_ne",
         "mean_norm_utility_social", "sum_utility_ne", "sum_utility_social",
         "mean_sinr_ne", "gamma_opt", "gamma_star_inf"});
    std::string hash = detail::hash_hex(scenario_hash(sc));

    RunResult rr;
    rr.summary = base_summary(sc);
    nlohmann::json per_rho = nlohmann::json::array();
    for (double rho : sc.rho_range) {
        GameParams p = sc.params;
        p.paths = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(p.chips / rho)));
        std::uint64_t rho_seed =
            uwbpc::detail::mix64(sc.seed ^ uwbpc::detail::mix64(p.paths));
        auto rows = compare_ne_vs_social(p, f, sc.model, sc.rake, run_ne,
                                         sc.trials, rho_seed);
        double gap_max = 0.0, gap_mean = 0.0;
        for (const auto& r : rows) {
            csv.row({std::to_string(sc.seed), std::to_string(r.trial), hash,
                     detail::fmt(p.load_factor()), std::to_string(p.paths),
                     detail::fmt(r.mean_norm_utility_ne),
                     detail::fmt(r.mean_norm_utility_social),
                     detail::fmt(r.sum_utility_ne), detail::fmt(r.sum_utility_social),
                     detail::fmt(r.mean_sinr_ne), detail::fmt(r.gamma_opt),
                     detail::fmt(r.gamma_star_inf)});
            double gap = (r.sum_utility_social - r.sum_utility_ne) /
                         r.sum_utility_social;
            gap_max = std::max(gap_max, gap);
            gap_mean += gap / static_cast<double>(rows.size());
        }
        per_rho.push_back({{"rho", p.load_factor()},
                           {"paths", p.paths},
                           {"mean_utility_gap", gap_mean},
                           {"max_utility_gap", gap_max}});
    }
    rr.summary["ne_vs_social"] = per_rho;
    return rr;
}

inline RunResult experiment_custom(const Scenario& sc,
                                   const std::filesystem::path& out_dir) {
    const std::size_t K = sc.params.users;
    PacketExpEfficiency f(sc.params.packet_bits);
    struct TrialOut {
        EquilibriumOutcome ne;
        IterationTrace trace;
        std::vector<double> h;
    };
    std::vector<TrialOut> results(sc.trials);
    detail::parallel_trials(sc.trials, [&](std::size_t t) {
        ChannelRealization real =
            draw_realization(sc.model, sc.params, detail::trial_seed(sc.seed, t));
        GainSet gains = compute_gains(real, sc.rake, sc.params);
        auto cfg = sc.brpc;
        cfg.record_trace = sc.dump_trace && t == 0;
        auto [ne, trace] = run_brpc(gains, sc.params, f, cfg);
        results[t].ne = std::move(ne);
        results[t].trace = std::move(trace);
        results[t].h.resize(K);
        for (std::size_t k = 0; k < K; ++k)
            results[t].h[k] = channel_gain(real, k);
    });

    detail::CsvWriter csv(out_dir / (sc.name + ".csv"), sc,
                          {"seed", "trial", "scenario_hash", "user", "channel_gain",
                           "power_w", "sinr", "target_sinr", "utility_bpj",
                           "clipped", "sweeps", "converged"});
    std::string hash = detail::hash_hex(scenario_hash(sc));
    std::size_t converged = 0;
    for (std::size_t t = 0; t < sc.trials; ++t) {
        const auto& ne = results[t].ne;
        if (ne.converged) ++converged;
        for (std::size_t k = 0; k < K; ++k)
            csv.row({std::to_string(sc.seed), std::to_string(t), hash,
                     std::to_string(k), detail::fmt(results[t].h[k]),
                     detail::fmt(ne.powers[k]), detail::fmt(ne.sinrs[k]),
                     detail::fmt(ne.target_sinr[k]), detail::fmt(ne.utilities[k]),
                     ne.clipped[k] ? "1" : "0", std::to_string(ne.iterations),
                     ne.converged ? "1" : "0"});
    }

    RunResult rr;
    if (sc.dump_trace && !results.empty() && !results[0].trace.powers.empty()) {
        rr.trace_path = out_dir / (sc.name + ".trace.csv");
        detail::CsvWriter tcsv(rr.trace_path, sc,
                               {"seed", "trial", "scenario_hash", "sweep", "user",
                                "power_w", "sinr"});
        const auto& tr = results[0].trace;
        for (std::size_t s = 0; s < tr.powers.size(); ++s)
            for (std::size_t k = 0; k < K; ++k)
                tcsv.row({std::to_string(sc.seed), "0", hash, std::to_string(s),
                          std::to_string(k), detail::fmt(tr.powers[s][k]),
                          detail::fmt(tr.sinrs[s][k])});
    }
    rr.summary = base_summary(sc);
    rr.summary["converged_trials"] = converged;
    return rr;
}

/// Runs the scenario's experiment, writing <name>.csv, <name>.summary.json
/// and (custom experiment, when requested) <name>.trace.csv under out_dir.
inline RunResult run_scenario(const Scenario& sc,
                              const std::filesystem::path& out_dir) {
    sc.validate();
    std::filesystem::create_directories(out_dir);
    RunResult rr;
    switch (sc.experiment) {
        case ExperimentKind::TableQ: rr = experiment_table_q(sc, out_dir); break;
        case ExperimentKind::UtilityVsGain:
            rr = experiment_utility_vs_gain(sc, out_dir);
            break;
        case ExperimentKind::GammaStarCurve:
            rr = experiment_gamma_star_curve(sc, out_dir);
            break;
        case ExperimentKind::OutageVsNf:
            rr = experiment_outage_vs_nf(sc, out_dir);
            break;
        case ExperimentKind::NeVsSocial:
            rr = experiment_ne_vs_social(sc, out_dir);
            break;
        case ExperimentKind::Custom: rr = experiment_custom(sc, out_dir); break;
    }
    rr.csv_path = out_dir / (sc.name + ".csv");
    rr.summary_path = out_dir / (sc.name + ".summary.json");
    std::ofstream sj(rr.summary_path);
    if (!sj)
        throw std::runtime_error("cannot open output file: " + rr.summary_path.string());
    sj << rr.summary.dump(2) << "\n";
    return rr;
}

}  // namespace uwbpc::harness
