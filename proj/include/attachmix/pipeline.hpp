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
#pragma once

// Reproducible experiment pipelines behind the command-line tool. Each run
// writes its outputs plus a manifest.json holding the full parameter set, so
// `rerun` can regenerate byte-identical data files from the manifest alone.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attachmix/em.hpp"
#include "attachmix/ingest.hpp"
#include "attachmix/likelihood.hpp"
#include "attachmix/netmodel.hpp"

namespace attachmix::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum class Method { kMle, kEm, kBoth };

struct SimulateOptions {
    std::string seed = "complete:3";
    ModelParams params{5, 3, 0.6};
    Count steps = 20000;
    std::uint64_t rng_seed = 1;
    bool export_graph = false;
    bool strict_seed = false;
    fs::path out_dir = ".";
};

struct EstimateOptions {
    fs::path log_path;
    Method method = Method::kBoth;
    EmConfig em;
    /// Re-estimate on prefixes every `stride` steps; 0 disables the prefix traces.
    Count stride = 100;
    /// Also estimate from each step's multiset alone.
    bool snapshot_mode = false;
    unsigned threads = 1;
    fs::path out_dir = ".";
};

struct DistOptions {
    ModelParams params{5, 3, 0.6};
    /// Largest in-degree tabulated; 0 picks the 99.9% quantile.
    Count k_max = 0;
    /// Empirical ensemble; runs == 0 skips it.
    std::string seed = "complete:3";
    Count steps = 20000;
    Count runs = 0;
    std::uint64_t rng_seed = 1;
    /// Optional edge list whose in-degree CCDF is compared against the theory.
    std::optional<fs::path> graph;
    unsigned threads = 1;
    fs::path out_dir = ".";
};

struct CiteOptions {
    fs::path edges;
    fs::path dates;
    std::string cutoff = "1992-02-29";
    ZeroInDegree em_zero_in_degree = ZeroInDegree::kDrop;
    Count m = 12;
    Count m_hat = 0;
    Count stride = 0;
    fs::path out_dir = ".";
};

/// Written next to every run's outputs.
struct RunManifest {
    std::string subcommand;
    json parameters;
    std::optional<std::uint64_t> rng_seed;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string version = ATTACHMIX_VERSION;
    double duration_seconds = 0.0;
    json summary;
};

void to_json(json& j, const RunManifest& m);
json to_json(const MleReport& report);
json to_json(const ReplayManifest& manifest);

RunManifest run_simulate(const SimulateOptions& opt);
RunManifest run_estimate(const EstimateOptions& opt);
RunManifest run_dist(const DistOptions& opt);
RunManifest run_cite(const CiteOptions& opt);

/// Re-executes the run described by a manifest, writing into `out_dir`
/// (the manifest's own output directory when empty).
RunManifest rerun(const fs::path& manifest_path, const fs::path& out_dir = {});

json parameters_of(const SimulateOptions& opt);
json parameters_of(const EstimateOptions& opt);
json parameters_of(const DistOptions& opt);
json parameters_of(const CiteOptions& opt);

/// Default output directory: $ATTACHMIX_OUT_DIR if set, otherwise ".".
fs::path default_out_dir();

}  // namespace attachmix::pipeline
