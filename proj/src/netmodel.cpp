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
#include "attachmix/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "attachmix/error.hpp"

namespace attachmix {

void ModelParams::validate() const {
    if (m < 1) throw DomainError("m must be at least 1");
    if (m_hat < 0) throw DomainError("m_hat must be non-negative");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
}

SeedSpec SeedSpec::complete(Count n) {
    if (n < 2) throw DomainError("complete seed needs at least 2 nodes");
    SeedSpec seed;
    seed.node_count = n;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v)
            if (u != v) seed.edges.emplace_back(u, v);
    return seed;
}

SeedReport validate_seed(const SeedSpec& seed, const ModelParams& params, UndersizedPool policy) {
    params.validate();
    if (seed.node_count < 1) throw DomainError("seed has no nodes");
    if (seed.edges.empty()) throw DomainError("seed has no edges; attachment needs e_prev > 0");

    std::vector<Count> in_degree(static_cast<std::size_t>(seed.node_count), 0);
    for (const auto& [u, v] : seed.edges) {
        if (u < 0 || v < 0 || u >= seed.node_count || v >= seed.node_count)
            throw DomainError("seed edge references an unknown node");
        if (u == v) throw DomainError("seed contains a self-loop at node " + std::to_string(u));
        ++in_degree[static_cast<std::size_t>(v)];
    }

    SeedReport report;
    const Count needed = std::max(params.m, params.m_hat);
    if (seed.node_count < needed) {
        const std::string msg = "seed has " + std::to_string(seed.node_count) +
                                " nodes, fewer than max(m, m_hat) = " + std::to_string(needed);
        if (policy == UndersizedPool::kReject) throw StructuralError(msg);
        report.undersized = true;
        report.warnings.push_back(msg + "; early steps draw endpoints with replacement");
    }
    report.zero_in_degree_nodes = std::count(in_degree.begin(), in_degree.end(), Count{0});
    if (report.zero_in_degree_nodes > 0)
        report.warnings.push_back(std::to_string(report.zero_in_degree_nodes) +
                                  " seed node(s) have in-degree 0");
    return report;
}

void SampleLog::push_step(std::span<const AttachmentRecord> step) {
    records_.insert(records_.end(), step.begin(), step.end());
    offsets_.push_back(records_.size());
}

RecordSpan SampleLog::step(std::size_t t) const {
    if (t < 1 || t > steps()) throw DomainError("step index out of range");
    return RecordSpan(records_).subspan(offsets_[t - 1], offsets_[t] - offsets_[t - 1]);
}

RecordSpan SampleLog::prefix(std::size_t t) const {
    if (t > steps()) throw DomainError("prefix longer than the log");
    return RecordSpan(records_).first(offsets_[t]);
}

double attachment_probability(Count k, Count e_prev, Count n_prev, double alpha) {
    if (e_prev <= 0 || n_prev <= 0) throw DomainError("edge and node counts must be positive");
    if (k < 0 || k > e_prev) throw DomainError("in-degree must lie in [0, e_prev]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    const double random_term = 1.0 / static_cast<double>(n_prev);
    return alpha * (static_cast<double>(k) / static_cast<double>(e_prev) - random_term) + random_term;
}

GrowingNetwork GrowingNetwork::from_seed(const SeedSpec& seed, bool keep_edges) {
    GrowingNetwork net;
    net.keep_edges_ = keep_edges;
    net.in_degree_.assign(static_cast<std::size_t>(seed.node_count), 0);
    net.edge_targets_.reserve(seed.edges.size());
    for (const auto& [u, v] : seed.edges) net.add_edge(u, v);
    return net;
}

void GrowingNetwork::add_edge(NodeId src, NodeId dst) {
    auto& k = in_degree_[static_cast<std::size_t>(dst)];
    if (k++ == 0) ++cited_nodes_;
    edge_targets_.push_back(dst);
    if (keep_edges_) edges_.emplace_back(src, dst);
}

namespace {

bool contains(const std::vector<NodeId>& xs, NodeId v) {
    return std::find(xs.begin(), xs.end(), v) != xs.end();
}

// Exact draw from the mixture restricted to nodes not yet chosen in this step.
NodeId draw_excluding(std::span<const Count> in_degree, Count e, double alpha,
                      const std::vector<NodeId>& chosen, Rng& rng) {
    const auto n = static_cast<Count>(in_degree.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_e = 1.0 / static_cast<double>(e);
    auto weight = [&](NodeId v) {
        return alpha * static_cast<double>(in_degree[static_cast<std::size_t>(v)]) * inv_e +
               (1.0 - alpha) * inv_n;
    };
    double remaining = 1.0;
    for (NodeId v : chosen) remaining -= weight(v);
    double u = rng.uniform() * remaining;
    NodeId last_positive = -1;
    for (NodeId v = 0; v < n; ++v) {
        if (contains(chosen, v)) continue;
        const double w = weight(v);
        if (w <= 0.0) continue;
        last_positive = v;
        if (u < w) return v;
        u -= w;
    }
    return last_positive;
}

}  // namespace

std::vector<AttachmentRecord> grow_step(GrowingNetwork& net, const ModelParams& params, Rng& rng,
                                        const GrowthOptions& options) {
    params.validate();
    const Count n = net.node_count();
    const Count e = net.edge_count();
    if (e < 1) throw DomainError("network has no edges; attachment needs e_prev > 0");

    // Nodes with non-zero attachment weight.
    const Count candidates = params.alpha < 1.0 ? n : net.cited_node_count();
    const bool attach_with_replacement = candidates < params.m;
    const bool respond_with_replacement = n < params.m_hat;
    if ((attach_with_replacement || respond_with_replacement) &&
        options.undersized == UndersizedPool::kReject) {
        throw StructuralError("only " + std::to_string(attach_with_replacement ? candidates : n) +
                              " distinct candidates for " +
                              std::to_string(attach_with_replacement ? params.m : params.m_hat) +
                              " endpoints");
    }

    auto mixture_draw = [&]() -> NodeId {
        const bool preferential = params.alpha >= 1.0 || (params.alpha > 0.0 && rng.uniform() < params.alpha);
        if (preferential) return net.edge_targets_[rng.below(static_cast<std::uint64_t>(e))];
        return static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    };

    constexpr int kMaxRejections = 64;
    std::vector<NodeId> targets;
    targets.reserve(static_cast<std::size_t>(params.m));
    for (Count i = 0; i < params.m; ++i) {
        NodeId v = mixture_draw();
        if (!attach_with_replacement) {
            int tries = 1;
            while (contains(targets, v) && tries < kMaxRejections) {
                v = mixture_draw();
                ++tries;
            }
            if (contains(targets, v)) v = draw_excluding(net.in_degree_, e, params.alpha, targets, rng);
        }
        targets.push_back(v);
    }

    std::vector<NodeId> sources;
    sources.reserve(static_cast<std::size_t>(params.m_hat));
    for (Count i = 0; i < params.m_hat; ++i) {
        NodeId v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
        if (!respond_with_replacement)
            while (contains(sources, v)) v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
        sources.push_back(v);
    }

    std::vector<AttachmentRecord> records;
    records.reserve(targets.size());
    for (NodeId v : targets) records.push_back({net.in_degree_[static_cast<std::size_t>(v)], e, n});

    const NodeId fresh = n;
    net.in_degree_.push_back(0);
    for (NodeId v : targets) net.add_edge(fresh, v);
    for (NodeId v : sources) net.add_edge(v, fresh);
    ++net.time_;
    return records;
}

GrowthResult grow_sequence(const SeedSpec& seed, const ModelParams& params, Count steps, Rng& rng,
                           const GrowthOptions& options) {
    if (steps < 0) throw DomainError("step count must be non-negative");
    GrowthResult result{GrowingNetwork::from_seed(seed, options.keep_edges), SampleLog{},
                        validate_seed(seed, params, options.undersized)};
    for (Count t = 0; t < steps; ++t) {
        const auto records = grow_step(result.network, params, rng, options);
        result.log.push_step(records);
    }
    return result;
}

// --- text formats -----------------------------------------------------------

void write_sample_log_csv(std::ostream& out, const SampleLog& log) {
    out << "step,k,e_prev,n_prev\n";
    for (std::size_t t = 1; t <= log.steps(); ++t)
        for (const auto& r : log.step(t)) out << t << ',' << r.k << ',' << r.e_prev << ',' << r.n_prev << '\n';
}

namespace {

bool parse_count(std::string_view text, Count& value) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

SampleLog read_sample_log_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++line_no;
    if (trim(line) != "step,k,e_prev,n_prev") throw ParseError("expected header step,k,e_prev,n_prev", line_no);

    SampleLog log;
    std::vector<AttachmentRecord> current;
    Count current_step = 0;
    auto flush_until = [&](Count step) {
        while (current_step < step) {
            if (current_step > 0) log.push_step(current);
            current.clear();
            ++current_step;
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        Count fields[4];
        std::size_t pos = 0;
        for (int i = 0; i < 4; ++i) {
            const auto comma = body.find(',', pos);
            const bool last = i == 3;
            if (last != (comma == std::string_view::npos)) throw ParseError("expected 4 fields", line_no);
            const auto field = body.substr(pos, last ? std::string_view::npos : comma - pos);
            if (!parse_count(trim(field), fields[i])) throw ParseError("non-integer field", line_no);
            pos = comma + 1;
        }
        const auto [step, k, e_prev, n_prev] = fields;
        if (step < 1 || step < current_step) throw ParseError("step numbers must be >= 1 and non-decreasing", line_no);
        if (e_prev < 1 || n_prev < 1 || k < 0 || k > e_prev)
            throw ParseError("record violates 0 <= k <= e_prev, e_prev >= 1, n_prev >= 1", line_no);
        flush_until(step);
        current.push_back({k, e_prev, n_prev});
    }
    if (current_step > 0) log.push_step(current);
    return log;
}

void write_edge_list(std::ostream& out, const GrowingNetwork& net) {
    if (!net.has_edge_list()) throw DomainError("network was grown without keeping its edge list");
    for (const auto& [u, v] : net.edges()) out << u << ' ' << v << '\n';
}

SeedSpec read_seed_spec(std::istream& in) {
    SeedSpec seed;
    std::unordered_map<std::string, NodeId> ids;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = ids.try_emplace(name, seed.node_count);
        if (inserted) ++seed.node_count;
        return it->second;
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a)) continue;
        if (!(fields >> b)) {
            intern(a);
            continue;
        }
        if (fields >> extra) throw ParseError("expected `src dst`", line_no);
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        seed.edges.emplace_back(u, v);
    }
    return seed;
}

SeedSpec resolve_seed_spec(const std::string& spec) {
    constexpr std::string_view kComplete = "complete:";
    if (spec.rfind(kComplete, 0) == 0) {
        Count n = 0;
        if (!parse_count(spec.substr(kComplete.size()), n)) throw DomainError("bad seed spec: " + spec);
        return SeedSpec::complete(n);
    }
    std::ifstream in(spec);
    if (!in) throw IoError("cannot open seed file " + spec);
    return read_seed_spec(in);
}

}  // namespace attachmix
