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
// attachmix: simulate mixed-attachment growth, estimate the preferential
// weight, and tabulate in-degree distributions.
//
// Exit codes: 0 success, 1 domain or validation error, 2 I/O error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "attachmix/error.hpp"
#include "attachmix/pipeline.hpp"

namespace ap = attachmix::pipeline;

namespace {

void add_model_flags(CLI::App* cmd, attachmix::ModelParams& p) {
    cmd->add_option("--m", p.m, "outgoing attachment edges per new node")->check(CLI::PositiveNumber);
    cmd->add_option("--m-hat", p.m_hat, "incoming response edges per new node")->check(CLI::NonNegativeNumber);
    cmd->add_option("--alpha", p.alpha, "preferential attachment weight")->check(CLI::Range(0.0, 1.0));
}

void report(const ap::RunManifest& m) {
    std::cout << m.summary.dump(2) << '\n';
    for (const auto& out : m.outputs) std::cerr << "wrote " << out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed preferential/random attachment: simulation, estimation, degree distributions"};
    app.set_config("--config", "", "key=value file mirroring the command-line flags");
    app.require_subcommand(1);
    app.set_version_flag("--version", ATTACHMIX_VERSION);
    const std::string out_default = ap::default_out_dir().string();

    ap::SimulateOptions sim;
    sim.out_dir = out_default;
    std::string sim_out = out_default;
    auto* simulate = app.add_subcommand("simulate", "grow a network and write its attachment sample log");
    simulate->add_option("seed", sim.seed, "seed graph: complete:N or an edge-list file")->capture_default_str();
    add_model_flags(simulate, sim.params);
    simulate->add_option("--steps", sim.steps, "growth steps")->check(CLI::NonNegativeNumber);
    simulate->add_option("--rng-seed", sim.rng_seed, "random seed");
    simulate->add_flag("--export-graph", sim.export_graph, "also write the edge list");
    simulate->add_flag("--strict-seed", sim.strict_seed, "reject seeds smaller than max(m, m_hat)");
    simulate->add_option("--out", sim_out, "output directory (default $ATTACHMIX_OUT_DIR or .)");

    ap::EstimateOptions est;
    std::string est_out = out_default, method = "both";
    bool keep_zero = false;
    auto* estimate = app.add_subcommand("estimate", "estimate alpha from a sample log");
    estimate->add_option("log", est.log_path, "sample log CSV (step,k,e_prev,n_prev)")->required();
    estimate->add_option("--method", method, "mle, em or both")->check(CLI::IsMember({"mle", "em", "both"}));
    estimate->add_option("--alpha-init", est.em.alpha_init, "EM starting point");
    estimate->add_option("--epsilon", est.em.epsilon, "EM stopping bound on |delta alpha|");
    estimate->add_option("--max-iter", est.em.max_iter, "EM iteration cap");
    estimate->add_flag("--keep-zero-indegree", keep_zero, "keep k = 0 records in the EM input");
    estimate->add_option("--stride", est.stride, "prefix re-estimation stride in steps (0 disables)");
    estimate->add_flag("--snapshot-mode", est.snapshot_mode, "also estimate from each step alone");
    estimate->add_option("--threads", est.threads, "worker threads");
    estimate->add_option("--out", est_out, "output directory");

    ap::DistOptions dist;
    std::string dist_out = out_default, graph;
    auto* dist_cmd = app.add_subcommand("dist", "stationary in-degree law and empirical comparisons");
    add_model_flags(dist_cmd, dist.params);
    dist_cmd->add_option("--k-max", dist.k_max, "largest in-degree tabulated (0: 99.9% quantile)");
    dist_cmd->add_option("--runs", dist.runs, "ensemble size for the empirical CCDF (0 skips)");
    dist_cmd->add_option("--steps", dist.steps, "growth steps per ensemble run");
    dist_cmd->add_option("--seed-graph", dist.seed, "ensemble seed graph: complete:N or edge-list file");
    dist_cmd->add_option("--rng-seed", dist.rng_seed, "random seed");
    dist_cmd->add_option("--graph", graph, "edge list whose in-degree CCDF is compared with the theory");
    dist_cmd->add_option("--threads", dist.threads, "worker threads");
    dist_cmd->add_option("--out", dist_out, "output directory");

    ap::CiteOptions cite;
    std::string cite_out = out_default;
    bool cite_keep_zero = false;
    auto* cite_cmd = app.add_subcommand("cite", "replay a timestamped citation dataset and estimate alpha");
    cite_cmd->add_option("edges", cite.edges, "edge file (citing cited)")->required();
    cite_cmd->add_option("dates", cite.dates, "dates file (id<TAB>YYYY-MM-DD)")->required();
    cite_cmd->add_option("--cutoff", cite.cutoff, "last date of the seed network");
    cite_cmd->add_flag("--keep-zero-indegree", cite_keep_zero, "keep k = 0 records in the EM input");
    cite_cmd->add_option("--m", cite.m, "m for the theoretical overlay");
    cite_cmd->add_option("--m-hat", cite.m_hat, "m_hat for the theoretical overlay");
    cite_cmd->add_option("--stride", cite.stride, "prefix trace stride (0 disables)");
    cite_cmd->add_option("--out", cite_out, "output directory");

    std::string manifest_path, rerun_out;
    auto* rerun_cmd = app.add_subcommand("rerun", "repeat a run from its manifest.json");
    rerun_cmd->add_option("manifest", manifest_path, "manifest written by an earlier run")->required();
    rerun_cmd->add_option("--out", rerun_out, "output directory (default: the original one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate) {
            sim.out_dir = sim_out;
            std::cerr << "rng seed " << sim.rng_seed << '\n';
            report(ap::run_simulate(sim));
        } else if (*estimate) {
            est.out_dir = est_out;
            est.em.zero_in_degree = keep_zero ? attachmix::ZeroInDegree::kKeep : attachmix::ZeroInDegree::kDrop;
            est.method = method == "mle" ? ap::Method::kMle : method == "em" ? ap::Method::kEm : ap::Method::kBoth;
            report(ap::run_estimate(est));
        } else if (*dist_cmd) {
            dist.out_dir = dist_out;
            if (!graph.empty()) dist.graph = graph;
            if (dist.runs > 0) std::cerr << "rng seed " << dist.rng_seed << '\n';
            report(ap::run_dist(dist));
        } else if (*cite_cmd) {
            cite.out_dir = cite_out;
            cite.em_zero_in_degree = cite_keep_zero ? attachmix::ZeroInDegree::kKeep : attachmix::ZeroInDegree::kDrop;
            report(ap::run_cite(cite));
        } else if (*rerun_cmd) {
            report(ap::rerun(manifest_path, rerun_out));
        }
    } catch (const attachmix::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
