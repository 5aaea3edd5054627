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
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "attachmix/error.hpp"
#include "attachmix/pipeline.hpp"

using namespace attachmix;
namespace ap = attachmix::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("attachmix_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

void check_rerun_identical(const fs::path& first, const std::string& name) {
    const fs::path second = scratch(name + "_rerun");
    const auto again = ap::rerun(first / "manifest.json", second);
    CHECK_FALSE(again.outputs.empty());
    for (const auto& entry : fs::directory_iterator(first)) {
        const auto file = entry.path().filename();
        if (file.extension() != ".csv" && file != "graph.txt") continue;
        INFO("file: " << file.string());
        REQUIRE(fs::exists(second / file));
        CHECK(slurp(entry.path()) == slurp(second / file));
    }
}

}  // namespace

TEST_CASE("simulate writes a log, a graph and a manifest; rerun reproduces them") {
    const fs::path dir = scratch("simulate");
    ap::SimulateOptions opt;
    opt.steps = 300;
    opt.rng_seed = 17;
    opt.export_graph = true;
    opt.out_dir = dir;
    const auto man = ap::run_simulate(opt);
    CHECK(fs::exists(dir / "samplelog.csv"));
    CHECK(fs::exists(dir / "graph.txt"));
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(j["subcommand"] == "simulate");
    CHECK(j["rng_seed"] == 17);
    CHECK(j["parameters"]["steps"] == 300);
    CHECK(man.summary["records"] == 1500);
    check_rerun_identical(dir, "simulate");
}

TEST_CASE("strict seed is honored by the simulate pipeline") {
    ap::SimulateOptions opt;
    opt.steps = 10;
    opt.strict_seed = true;
    opt.out_dir = scratch("strict");
    CHECK_THROWS_AS(ap::run_simulate(opt), StructuralError);
}

TEST_CASE("estimate reports both estimators and prefix traces") {
    const fs::path sim = scratch("est_sim");
    ap::SimulateOptions s;
    s.steps = 500;
    s.rng_seed = 3;
    s.out_dir = sim;
    ap::run_simulate(s);

    const fs::path dir = scratch("estimate");
    ap::EstimateOptions opt;
    opt.log_path = sim / "samplelog.csv";
    opt.stride = 100;
    opt.snapshot_mode = true;
    opt.out_dir = dir;
    ap::run_estimate(opt);
    const auto j = nlohmann::json::parse(slurp(dir / "estimate.json"));
    CHECK(j["mle"]["alpha_hat"].get<double>() > 0.0);
    CHECK(j["mle"].contains("bracket"));
    CHECK(j["em"]["final_alpha"].get<double>() > 0.0);
    CHECK(j["abs_difference"].get<double>() < 0.05);
    for (const char* f : {"em_trace.csv", "mle_prefix_trace.csv", "em_prefix_trace.csv", "snapshot_trace.csv"})
        CHECK(fs::exists(dir / f));
    std::ifstream trace(dir / "mle_prefix_trace.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header == "t,alpha_hat");
    check_rerun_identical(dir, "estimate");
}

TEST_CASE("estimate on a missing log is an I/O error") {
    ap::EstimateOptions opt;
    opt.log_path = "/nonexistent/samplelog.csv";
    opt.out_dir = scratch("est_missing");
    CHECK_THROWS_AS(ap::run_estimate(opt), IoError);
}

TEST_CASE("dist tabulates the theory and an ensemble") {
    const fs::path dir = scratch("dist");
    ap::DistOptions opt;
    opt.runs = 3;
    opt.steps = 300;
    opt.out_dir = dir;
    const auto man = ap::run_dist(opt);
    CHECK(fs::exists(dir / "theory.csv"));
    CHECK(fs::exists(dir / "empirical.csv"));
    CHECK(man.summary["k_max"].get<Count>() >= man.summary["k99"].get<Count>());
    std::ifstream theory(dir / "theory.csv");
    std::string header, first;
    std::getline(theory, header);
    std::getline(theory, first);
    CHECK(header == "k,pmf,ccdf");
    CHECK(first.rfind("3,", 0) == 0);
    check_rerun_identical(dir, "dist");

    ap::DistOptions bad;
    bad.k_max = 2;
    bad.out_dir = scratch("dist_bad");
    CHECK_THROWS_AS(ap::run_dist(bad), DomainError);
}

TEST_CASE("cite replays a citation dataset") {
    const fs::path in = scratch("cite_in");
    write_file(in / "edges.txt", "1 2\n3 1\n3 2\n3 4\n5 3\n");
    write_file(in / "dates.txt", "1\t1992-02-10\n2\t1992-01-05\n3\t1992-03-01\n5\t1992-03-01\n");
    const fs::path dir = scratch("cite");
    ap::CiteOptions opt;
    opt.edges = in / "edges.txt";
    opt.dates = in / "dates.txt";
    opt.m = 2;
    opt.m_hat = 1;
    opt.out_dir = dir;
    ap::run_cite(opt);
    const auto replay = nlohmann::json::parse(slurp(dir / "replay.json"));
    CHECK(replay["seed_nodes"] == 2);
    CHECK(replay["seed_edges"] == 1);
    CHECK(replay["arrivals"] == 2);
    CHECK(replay["final_nodes"] == 5);
    CHECK(replay["final_edges"] == 5);
    const auto est = nlohmann::json::parse(slurp(dir / "estimate.json"));
    CHECK(est["overlay"].contains("better_fit"));
    check_rerun_identical(dir, "cite");
}
