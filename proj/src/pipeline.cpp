/*
 * Copyright (C) 2026 The attachmix Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "attachmix/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "attachmix/degree_dist.hpp"
#include "attachmix/error.hpp"

namespace attachmix::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    // Opens a file for writing and records it in the manifest's output list.
    std::ofstream open(const std::string& name, RunManifest& manifest) const {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << std::setprecision(17);
        manifest.outputs.push_back(path.string());
        return out;
    }

    void finish(std::ofstream& out, const std::string& name) const {
        out.flush();
        if (!out) throw IoError("write failed for " + (dir_ / name).string());
    }

    void write_manifest(RunManifest& manifest, Clock::time_point start) const {
        manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        const fs::path path = dir_ / "manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << json(manifest).dump(2) << '\n';
        if (!out) throw IoError("write failed for " + path.string());
    }

private:
    fs::path dir_;
};

RunManifest make_manifest(std::string subcommand, json parameters) {
    RunManifest m;
    m.subcommand = std::move(subcommand);
    m.parameters = std::move(parameters);
    return m;
}

json bound(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

const char* method_name(Method m) {
    switch (m) {
        case Method::kMle: return "mle";
        case Method::kEm: return "em";
        case Method::kBoth: return "both";
    }
    return "both";
}

Method parse_method(const std::string& s) {
    if (s == "mle") return Method::kMle;
    if (s == "em") return Method::kEm;
    if (s == "both") return Method::kBoth;
    throw DomainError("unknown estimation method '" + s + "'");
}

const char* zero_name(ZeroInDegree z) { return z == ZeroInDegree::kDrop ? "drop" : "keep"; }

ZeroInDegree parse_zero(const std::string& s) {
    if (s == "drop") return ZeroInDegree::kDrop;
    if (s == "keep") return ZeroInDegree::kKeep;
    throw DomainError("unknown zero in-degree policy '" + s + "'");
}

json params_json(const ModelParams& p) { return {{"m", p.m}, {"m_hat", p.m_hat}, {"alpha", p.alpha}}; }

ModelParams params_from(const json& j) {
    return {j.at("m").get<Count>(), j.at("m_hat").get<Count>(), j.at("alpha").get<double>()};
}

json em_json(const EmTrace& trace, ZeroInDegree policy) {
    return {{"final_alpha", trace.final_alpha},      {"converged", trace.converged},
            {"iterations", trace.updates()},         {"records_used", trace.records_used},
            {"records_dropped", trace.records_dropped}, {"zero_in_degree", zero_name(policy)}};
}

SampleLog read_log(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sample log " + path.string());
    return read_sample_log_csv(in);
}

std::vector<std::size_t> checkpoints(std::size_t steps, Count stride) {
    std::vector<std::size_t> ts;
    if (stride <= 0) return ts;
    for (std::size_t t = static_cast<std::size_t>(stride); t <= steps; t += static_cast<std::size_t>(stride))
        ts.push_back(t);
    if (ts.empty() || ts.back() != steps) ts.push_back(steps);
    return ts;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
    };
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// `t,alpha_hat` on prefixes B_t; prefixes without information are skipped.
void write_mle_prefix_trace(std::ostream& out, const SampleLog& log, Count stride, unsigned threads) {
    const auto ts = checkpoints(log.steps(), stride);
    std::vector<RootTracker> trackers;
    trackers.reserve(ts.size());
    RootTracker running;
    std::size_t done = 0;
    for (std::size_t t : ts) {
        for (; done < t; ++done) running.add(log.step(done + 1));
        trackers.push_back(running);
    }
    std::vector<std::optional<double>> estimates(ts.size());
    parallel_for(ts.size(), threads, [&](std::size_t i) {
        const auto prefix = log.prefix(ts[i]);
        if (prefix.empty() || trackers[i].degenerate_count() == static_cast<Count>(prefix.size())) return;
        estimates[i] = mle_estimate(prefix, trackers[i]).alpha_hat;
    });
    out << "t,alpha_hat\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (estimates[i]) out << ts[i] << ',' << *estimates[i] << '\n';
}

// EM on each prefix, warm-started from the previous checkpoint.
void write_em_prefix_trace(std::ostream& out, const SampleLog& log, Count stride, EmConfig cfg) {
    cfg.track_log_likelihood = false;
    out << "t,alpha_hat\n";
    for (std::size_t t : checkpoints(log.steps(), stride)) {
        const auto prefix = log.prefix(t);
        if (em_input(prefix, cfg.zero_in_degree).empty()) continue;
        const auto trace = em_estimate(prefix, cfg);
        out << t << ',' << trace.final_alpha << '\n';
        cfg.alpha_init = std::clamp(trace.final_alpha, 1e-6, 1.0 - 1e-6);
    }
}

// Per-step estimates from A_t alone.
void write_snapshot_trace(std::ostream& out, const SampleLog& log, unsigned threads) {
    std::vector<std::optional<double>> estimates(log.steps());
    parallel_for(log.steps(), threads, [&](std::size_t i) {
        const auto step = log.step(i + 1);
        RootTracker roots;
        roots.add(step);
        if (step.empty() || roots.degenerate_count() == static_cast<Count>(step.size())) return;
        estimates[i] = mle_estimate(step, roots).alpha_hat;
    });
    out << "t,alpha_hat\n";
    for (std::size_t i = 0; i < estimates.size(); ++i)
        if (estimates[i]) out << i + 1 << ',' << *estimates[i] << '\n';
}

void write_theory_csv(std::ostream& out, const StationaryDistribution& sd, Count k_max) {
    const Eigen::VectorXd pmf = sd.pmf_table(k_max);
    const Eigen::VectorXd ccdf = sd.ccdf_table(k_max);
    out << "k,pmf,ccdf\n";
    for (Eigen::Index i = 0; i < pmf.size(); ++i) out << sd.support_start() + i << ',' << pmf(i) << ',' << ccdf(i) << '\n';
}

void write_empirical_csv(std::ostream& out, const Eigen::VectorXd& ccdf) {
    out << "k,ccdf_empirical\n";
    for (Eigen::Index k = 0; k < ccdf.size(); ++k) out << k << ',' << ccdf(k) << '\n';
}

std::vector<Count> in_degrees_of_edge_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph " + path.string());
    const SeedSpec g = read_seed_spec(in);
    std::vector<Count> k(static_cast<std::size_t>(g.node_count), 0);
    for (const auto& [u, v] : g.edges) ++k[static_cast<std::size_t>(v)];
    return k;
}

}  // namespace

fs::path default_out_dir() {
    if (const char* dir = std::getenv("ATTACHMIX_OUT_DIR"); dir && *dir) return dir;
    return ".";
}

void to_json(json& j, const RunManifest& m) {
    j = json{{"subcommand", m.subcommand},
             {"parameters", m.parameters},
             {"rng_seed", m.rng_seed ? json(*m.rng_seed) : json(nullptr)},
             {"inputs", m.inputs},
             {"outputs", m.outputs},
             {"version", m.version},
             {"duration_seconds", m.duration_seconds},
             {"summary", m.summary}};
}

json to_json(const MleReport& report) {
    return {{"alpha_hat", report.alpha_hat},
            {"bracket", {bound(report.bracket_lo), bound(report.bracket_hi)}},
            {"theorem1_satisfied", report.theorem1_satisfied},
            {"positive_multiplicity_parity", report.positive_parity_even() ? "even" : "odd"},
            {"loglik", report.log_likelihood},
            {"detail", report.detail}};
}

json to_json(const ReplayManifest& mf) {
    return {{"seed_nodes", mf.seed_nodes},   {"seed_edges", mf.seed_edges},
            {"arrivals", mf.arrivals},       {"final_nodes", mf.final_nodes},
            {"final_edges", mf.final_edges}, {"mean_citations_per_arrival", mf.mean_citations},
            {"median_citations_per_arrival", mf.median_citations}};
}

json parameters_of(const SimulateOptions& o) {
    return {{"seed", o.seed},         {"params", params_json(o.params)}, {"steps", o.steps},
            {"rng_seed", o.rng_seed}, {"export_graph", o.export_graph},  {"strict_seed", o.strict_seed},
            {"out_dir", o.out_dir.string()}};
}

json parameters_of(const EstimateOptions& o) {
    return {{"log", o.log_path.string()},
            {"method", method_name(o.method)},
            {"em", {{"alpha_init", o.em.alpha_init},
                    {"epsilon", o.em.epsilon},
                    {"max_iter", o.em.max_iter},
                    {"zero_in_degree", zero_name(o.em.zero_in_degree)}}},
            {"stride", o.stride},
            {"snapshot_mode", o.snapshot_mode},
            {"threads", o.threads},
            {"out_dir", o.out_dir.string()}};
}

json parameters_of(const DistOptions& o) {
    return {{"params", params_json(o.params)}, {"k_max", o.k_max},       {"seed", o.seed},
            {"steps", o.steps},               {"runs", o.runs},          {"rng_seed", o.rng_seed},
            {"graph", o.graph ? json(o.graph->string()) : json(nullptr)}, {"threads", o.threads},
            {"out_dir", o.out_dir.string()}};
}

json parameters_of(const CiteOptions& o) {
    return {{"edges", o.edges.string()},   {"dates", o.dates.string()}, {"cutoff", o.cutoff},
            {"em_zero_in_degree", zero_name(o.em_zero_in_degree)},      {"m", o.m},
            {"m_hat", o.m_hat},            {"stride", o.stride},        {"out_dir", o.out_dir.string()}};
}

RunManifest run_simulate(const SimulateOptions& opt) {
    const auto start = Clock::now();
    RunManifest manifest = make_manifest("simulate", parameters_of(opt));
    manifest.rng_seed = opt.rng_seed;
    const SeedSpec seed = resolve_seed_spec(opt.seed);
    if (opt.seed.rfind("complete:", 0) != 0) manifest.inputs.push_back(opt.seed);

    const OutputDir dir(opt.out_dir);
    Rng rng(opt.rng_seed);
    const GrowthOptions growth{opt.strict_seed ? UndersizedPool::kReject : UndersizedPool::kWarmUpWithReplacement,
                               opt.export_graph};
    const auto result = grow_sequence(seed, opt.params, opt.steps, rng, growth);

    auto log_out = dir.open("samplelog.csv", manifest);
    write_sample_log_csv(log_out, result.log);
    dir.finish(log_out, "samplelog.csv");
    if (opt.export_graph) {
        auto graph_out = dir.open("graph.txt", manifest);
        write_edge_list(graph_out, result.network);
        dir.finish(graph_out, "graph.txt");
    }
    manifest.summary = {{"nodes", result.network.node_count()},
                        {"edges", result.network.edge_count()},
                        {"steps", result.log.steps()},
                        {"records", result.log.size()},
                        {"seed_warnings", result.seed_report.warnings}};
    dir.write_manifest(manifest, start);
    return manifest;
}

RunManifest run_estimate(const EstimateOptions& opt) {
    const auto start = Clock::now();
    RunManifest manifest = make_manifest("estimate", parameters_of(opt));
    manifest.inputs.push_back(opt.log_path.string());
    const SampleLog log = read_log(opt.log_path);
    if (log.empty()) throw NoInformationError("sample log has no records");
    const OutputDir dir(opt.out_dir);

    json estimate;
    if (opt.method != Method::kEm) estimate["mle"] = to_json(mle_estimate(log));
    if (opt.method != Method::kMle) {
        const EmTrace trace = em_estimate(log, opt.em);
        estimate["em"] = em_json(trace, opt.em.zero_in_degree);
        auto out = dir.open("em_trace.csv", manifest);
        write_em_trace_csv(out, trace);
        dir.finish(out, "em_trace.csv");
    }
    if (opt.method == Method::kBoth)
        estimate["abs_difference"] =
            std::abs(estimate["mle"]["alpha_hat"].get<double>() - estimate["em"]["final_alpha"].get<double>());

    auto est_out = dir.open("estimate.json", manifest);
    est_out << estimate.dump(2) << '\n';
    dir.finish(est_out, "estimate.json");

    if (opt.stride > 0) {
        if (opt.method != Method::kEm) {
            auto out = dir.open("mle_prefix_trace.csv", manifest);
            write_mle_prefix_trace(out, log, opt.stride, opt.threads);
            dir.finish(out, "mle_prefix_trace.csv");
        }
        if (opt.method != Method::kMle) {
            auto out = dir.open("em_prefix_trace.csv", manifest);
            write_em_prefix_trace(out, log, opt.stride, opt.em);
            dir.finish(out, "em_prefix_trace.csv");
        }
    }
    if (opt.snapshot_mode) {
        auto out = dir.open("snapshot_trace.csv", manifest);
        write_snapshot_trace(out, log, opt.threads);
        dir.finish(out, "snapshot_trace.csv");
    }
    manifest.summary = estimate;
    dir.write_manifest(manifest, start);
    return manifest;
}

RunManifest run_dist(const DistOptions& opt) {
    const auto start = Clock::now();
    RunManifest manifest = make_manifest("dist", parameters_of(opt));
    const StationaryDistribution sd(opt.params);
    const Count k_max = opt.k_max > 0 ? opt.k_max : sd.quantile(0.999);
    if (k_max < opt.params.m_hat) throw DomainError("k_max must be at least m_hat");
    const Count k99 = sd.quantile(0.99);
    const OutputDir dir(opt.out_dir);

    auto theory_out = dir.open("theory.csv", manifest);
    write_theory_csv(theory_out, sd, k_max);
    dir.finish(theory_out, "theory.csv");
    manifest.summary["k_max"] = k_max;
    manifest.summary["k99"] = k99;

    if (opt.runs > 0) {
        manifest.rng_seed = opt.rng_seed;
        const SeedSpec seed = resolve_seed_spec(opt.seed);
        const Eigen::VectorXd ccdf = ensemble_mean_ccdf(seed, opt.params, opt.steps, opt.runs, Rng(opt.rng_seed),
                                                        opt.threads);
        auto out = dir.open("empirical.csv", manifest);
        write_empirical_csv(out, ccdf);
        dir.finish(out, "empirical.csv");
        manifest.summary["ensemble_sup_distance"] = sup_ccdf_distance(ccdf, sd, opt.params.m_hat, k99);
    }
    if (opt.graph) {
        manifest.inputs.push_back(opt.graph->string());
        const Eigen::VectorXd ccdf = empirical_ccdf(empirical_distribution(in_degrees_of_edge_list(*opt.graph)));
        auto out = dir.open("empirical_graph.csv", manifest);
        write_empirical_csv(out, ccdf);
        dir.finish(out, "empirical_graph.csv");
        manifest.summary["graph_sup_distance"] = sup_ccdf_distance(ccdf, sd, opt.params.m_hat, k99);
    }
    dir.write_manifest(manifest, start);
    return manifest;
}

RunManifest run_cite(const CiteOptions& opt) {
    const auto start = Clock::now();
    RunManifest manifest = make_manifest("cite", parameters_of(opt));
    manifest.inputs = {opt.edges.string(), opt.dates.string()};
    const CitationDataset ds = load_dataset(opt.edges, opt.dates);
    const ReplaySequence seq = build_replay(ds, parse_date(opt.cutoff));
    const ReplayResult replay = replay_to_samplelog(seq);
    const OutputDir dir(opt.out_dir);

    json replay_json = to_json(replay.manifest);
    replay_json["dataset"] = {{"papers", ds.paper_count()},
                              {"edges", ds.edges.size()},
                              {"edge_lines", ds.stats.edge_lines},
                              {"self_citations_removed", ds.stats.self_citations_removed},
                              {"duplicate_edges_removed", ds.stats.duplicate_edges_removed},
                              {"undated_citing_edges_dropped", ds.stats.undated_citing_edges},
                              {"duplicate_dates", ds.stats.duplicate_dates},
                              {"seed_external_edges_dropped", seq.seed_external_edges}};
    auto replay_out = dir.open("replay.json", manifest);
    replay_out << replay_json.dump(2) << '\n';
    dir.finish(replay_out, "replay.json");

    auto log_out = dir.open("samplelog.csv", manifest);
    write_sample_log_csv(log_out, replay.log);
    dir.finish(log_out, "samplelog.csv");

    // Zero in-degree citees are kept for the MLE; EM follows the chosen policy.
    const MleReport mle = mle_estimate(replay.log);
    EmConfig em_cfg;
    em_cfg.zero_in_degree = opt.em_zero_in_degree;
    const EmTrace em = em_estimate(replay.log, em_cfg);

    const Eigen::VectorXd empirical = empirical_ccdf(empirical_distribution(replay.final_in_degrees));
    auto emp_out = dir.open("ccdf_empirical.csv", manifest);
    write_empirical_csv(emp_out, empirical);
    dir.finish(emp_out, "ccdf_empirical.csv");

    json estimate = {{"mle", to_json(mle)}, {"em", em_json(em, opt.em_zero_in_degree)}};
    const Count k_hi = std::max<Count>(opt.m_hat, static_cast<Count>(empirical.size()) - 1);
    auto overlay = [&](const char* name, double alpha) {
        const StationaryDistribution sd(ModelParams{opt.m, opt.m_hat, alpha});
        const std::string file = std::string("theory_") + name + ".csv";
        auto out = dir.open(file, manifest);
        write_theory_csv(out, sd, k_hi);
        dir.finish(out, file);
        return sup_ccdf_distance(empirical, sd, opt.m_hat, k_hi);
    };
    const double fit_mle = overlay("mle", mle.alpha_hat);
    const double fit_em = overlay("em", em.final_alpha);
    estimate["overlay"] = {{"m", opt.m},
                           {"m_hat", opt.m_hat},
                           {"sup_distance_mle", fit_mle},
                           {"sup_distance_em", fit_em},
                           {"better_fit", fit_mle <= fit_em ? "mle" : "em"}};
    auto est_out = dir.open("estimate.json", manifest);
    est_out << estimate.dump(2) << '\n';
    dir.finish(est_out, "estimate.json");

    if (opt.stride > 0) {
        auto out = dir.open("mle_prefix_trace.csv", manifest);
        write_mle_prefix_trace(out, replay.log, opt.stride, 1);
        dir.finish(out, "mle_prefix_trace.csv");
        auto em_out = dir.open("em_prefix_trace.csv", manifest);
        write_em_prefix_trace(em_out, replay.log, opt.stride, em_cfg);
        dir.finish(em_out, "em_prefix_trace.csv");
    }
    manifest.summary = {{"replay", to_json(replay.manifest)}, {"estimate", estimate}};
    dir.write_manifest(manifest, start);
    return manifest;
}

RunManifest rerun(const fs::path& manifest_path, const fs::path& out_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed manifest: ") + e.what());
    }
    try {
        const json& p = manifest.at("parameters");
        const std::string sub = manifest.at("subcommand");
        const fs::path dir = out_dir.empty() ? fs::path(p.at("out_dir").get<std::string>()) : out_dir;
        if (sub == "simulate") {
            SimulateOptions o;
            o.seed = p.at("seed");
            o.params = params_from(p.at("params"));
            o.steps = p.at("steps");
            o.rng_seed = p.at("rng_seed");
            o.export_graph = p.at("export_graph");
            o.strict_seed = p.at("strict_seed");
            o.out_dir = dir;
            return run_simulate(o);
        }
        if (sub == "estimate") {
            EstimateOptions o;
            o.log_path = p.at("log").get<std::string>();
            o.method = parse_method(p.at("method"));
            const json& em = p.at("em");
            o.em.alpha_init = em.at("alpha_init");
            o.em.epsilon = em.at("epsilon");
            o.em.max_iter = em.at("max_iter");
            o.em.zero_in_degree = parse_zero(em.at("zero_in_degree"));
            o.stride = p.at("stride");
            o.snapshot_mode = p.at("snapshot_mode");
            o.threads = p.at("threads");
            o.out_dir = dir;
            return run_estimate(o);
        }
        if (sub == "dist") {
            DistOptions o;
            o.params = params_from(p.at("params"));
            o.k_max = p.at("k_max");
            o.seed = p.at("seed");
            o.steps = p.at("steps");
            o.runs = p.at("runs");
            o.rng_seed = p.at("rng_seed");
            if (!p.at("graph").is_null()) o.graph = fs::path(p.at("graph").get<std::string>());
            o.threads = p.at("threads");
            o.out_dir = dir;
            return run_dist(o);
        }
        if (sub == "cite") {
            CiteOptions o;
            o.edges = p.at("edges").get<std::string>();
            o.dates = p.at("dates").get<std::string>();
            o.cutoff = p.at("cutoff");
            o.em_zero_in_degree = parse_zero(p.at("em_zero_in_degree"));
            o.m = p.at("m");
            o.m_hat = p.at("m_hat");
            o.stride = p.at("stride");
            o.out_dir = dir;
            return run_cite(o);
        }
        throw DomainError("manifest names unknown subcommand '" + sub + "'");
    } catch (const json::exception& e) {
        throw DomainError(std::string("manifest is missing parameters: ") + e.what());
    }
}

}  // namespace attachmix::pipeline
