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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attachmix/rng.hpp"

namespace attachmix {

using Count = std::int64_t;
using NodeId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

/// Parameters of the mixed attachment / response growth model.
///
/// Each step adds one node with `m` outgoing edges (each endpoint chosen by
/// preferential attachment with probability `alpha`, uniformly otherwise) and
/// `m_hat` incoming edges from uniformly chosen existing nodes.
struct ModelParams {
    Count m = 1;
    Count m_hat = 0;
    double alpha = 0.0;

    /// Throws DomainError unless m >= 1, m_hat >= 0 and alpha in [0, 1].
    void validate() const;
};

/// What to do when a step needs more distinct endpoints than the network can offer.
enum class UndersizedPool {
    /// Draw with replacement for that step (parallel edges may appear). Only
    /// reachable while the network is smaller than max(m, m_hat), i.e. from an
    /// undersized seed such as K3 with m = 5.
    kWarmUpWithReplacement,
    /// Throw StructuralError.
    kReject,
};

struct GrowthOptions {
    UndersizedPool undersized = UndersizedPool::kWarmUpWithReplacement;
    /// Keep the full edge list (needed only for graph export).
    bool keep_edges = false;
};

/// Seed graph G0 on dense node ids 0..node_count-1.
struct SeedSpec {
    Count node_count = 0;
    std::vector<Edge> edges;

    /// Complete directed graph on n nodes (every ordered pair, no loops).
    static SeedSpec complete(Count n);
};

struct SeedReport {
    bool undersized = false;
    Count zero_in_degree_nodes = 0;
    std::vector<std::string> warnings;
};

/// Hard errors: no nodes, no edges, self-loops, out-of-range ids, or an
/// undersized seed under UndersizedPool::kReject. Zero in-degree nodes and
/// undersized seeds under warm-up are reported as warnings.
SeedReport validate_seed(const SeedSpec& seed, const ModelParams& params,
                         UndersizedPool policy = UndersizedPool::kWarmUpWithReplacement);

/// One attachment observation: the chosen target's in-degree together with
/// the edge and node counts of the snapshot it was chosen from.
struct AttachmentRecord {
    Count k = 0;
    Count e_prev = 1;
    Count n_prev = 1;

    friend bool operator==(const AttachmentRecord&, const AttachmentRecord&) = default;
};

using RecordSpan = std::span<const AttachmentRecord>;

/// Per-step multisets of attachment records, stored contiguously.
class SampleLog {
public:
    SampleLog() : offsets_{0} {}

    /// Append a step holding the given records (may be empty).
    void push_step(std::span<const AttachmentRecord> step);

    std::size_t steps() const { return offsets_.size() - 1; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Records of step t, 1-based as in the growth process.
    RecordSpan step(std::size_t t) const;
    RecordSpan records() const { return records_; }
    /// Records of steps 1..t.
    RecordSpan prefix(std::size_t t) const;

    friend bool operator==(const SampleLog&, const SampleLog&) = default;

private:
    std::vector<AttachmentRecord> records_;
    std::vector<std::size_t> offsets_;
};

/// Mixed attachment probability of a node with in-degree k:
/// alpha * (k / e_prev - 1 / n_prev) + 1 / n_prev.
double attachment_probability(Count k, Count e_prev, Count n_prev, double alpha);

/// Directed growing network. Only the in-degree table is mandatory; the edge
/// list is kept on request.
class GrowingNetwork {
public:
    static GrowingNetwork from_seed(const SeedSpec& seed, bool keep_edges = false);

    Count node_count() const { return static_cast<Count>(in_degree_.size()); }
    Count edge_count() const { return static_cast<Count>(edge_targets_.size()); }
    Count time() const { return time_; }
    Count in_degree(NodeId v) const { return in_degree_.at(static_cast<std::size_t>(v)); }
    std::span<const Count> in_degrees() const { return in_degree_; }
    /// Nodes with positive in-degree.
    Count cited_node_count() const { return cited_nodes_; }

    bool has_edge_list() const { return keep_edges_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// One step of the growth process; returns the attachment records of the
    /// m targets (response edges are not logged).
    friend std::vector<AttachmentRecord> grow_step(GrowingNetwork& net, const ModelParams& params,
                                                   Rng& rng, const GrowthOptions& options);

private:
    void add_edge(NodeId src, NodeId dst);

    std::vector<Count> in_degree_;
    // Target of every edge; a uniform pick from it is a preferential pick.
    std::vector<NodeId> edge_targets_;
    std::vector<Edge> edges_;
    Count cited_nodes_ = 0;
    Count time_ = 0;
    bool keep_edges_ = false;
};

std::vector<AttachmentRecord> grow_step(GrowingNetwork& net, const ModelParams& params, Rng& rng,
                                        const GrowthOptions& options = {});

struct GrowthResult {
    GrowingNetwork network;
    SampleLog log;
    SeedReport seed_report;
};

/// Validates the seed and applies `steps` growth steps.
GrowthResult grow_sequence(const SeedSpec& seed, const ModelParams& params, Count steps, Rng& rng,
                           const GrowthOptions& options = {});

// --- text formats -----------------------------------------------------------

/// CSV `step,k,e_prev,n_prev`, one row per record.
void write_sample_log_csv(std::ostream& out, const SampleLog& log);
/// Inverse of write_sample_log_csv. Step numbers must be non-decreasing and
/// start at 1 or later; skipped step numbers become empty steps.
SampleLog read_sample_log_csv(std::istream& in);

/// Edge list, one `src dst` pair per line.
void write_edge_list(std::ostream& out, const GrowingNetwork& net);

/// Seed from an edge-list text: `src dst` lines, single-id lines declare
/// isolated nodes, `#` starts a comment. Ids are remapped densely in order of
/// first appearance.
SeedSpec read_seed_spec(std::istream& in);

/// `complete:N` or a path to an edge-list file.
SeedSpec resolve_seed_spec(const std::string& spec);

}  // namespace attachmix
