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
#include "attachmix/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <unordered_set>

#include "attachmix/error.hpp"

namespace attachmix {

namespace {

template <typename T>
bool parse_int(std::string_view text, T& value) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end;
}

// Splits on blanks and tabs; returns the number of fields found (at most `max`).
std::size_t split_fields(std::string_view line, std::string_view* out, std::size_t max) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
        pos = line.find_first_not_of(" \t\r", pos);
        if (pos == std::string_view::npos) break;
        const auto end = std::min(line.find_first_of(" \t\r", pos), line.size());
        if (count == max) return max + 1;
        out[count++] = line.substr(pos, end - pos);
        pos = end;
    }
    return count;
}

std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace

Date parse_date(std::string_view text) {
    int y = 0;
    unsigned mo = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
        !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d))
        throw DomainError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!ymd.ok()) throw DomainError("invalid calendar date '" + std::string(text) + "'");
    return static_cast<Date>(std::chrono::sys_days{ymd}.time_since_epoch().count());
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{date}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

Count CitationDataset::paper_count() const {
    std::unordered_set<PaperId> ids;
    for (const auto& [u, v] : edges) {
        ids.insert(u);
        ids.insert(v);
    }
    return static_cast<Count>(ids.size());
}

CitationDataset load_dataset(std::istream& edges, std::istream& dates) {
    CitationDataset ds;
    std::string line;
    std::size_t line_no = 0;
    std::string_view fields[2];

    while (std::getline(dates, line)) {
        ++line_no;
        const auto body = strip_comment(line);
        const auto n = split_fields(body, fields, 2);
        if (n == 0) continue;
        PaperId id = 0;
        if (n != 2 || !parse_int(fields[0], id)) throw ParseError("expected `id<TAB>YYYY-MM-DD`", line_no);
        Date date = 0;
        try {
            date = parse_date(fields[1]);
        } catch (const DomainError& e) {
            throw ParseError(e.what(), line_no);
        }
        auto [it, inserted] = ds.dates.try_emplace(id, date);
        if (!inserted) {
            ++ds.stats.duplicate_dates;
            it->second = std::min(it->second, date);
        }
    }

    line_no = 0;
    while (std::getline(edges, line)) {
        ++line_no;
        const auto body = strip_comment(line);
        const auto n = split_fields(body, fields, 2);
        if (n == 0) continue;
        PaperId citing = 0, cited = 0;
        if (n != 2 || !parse_int(fields[0], citing) || !parse_int(fields[1], cited))
            throw ParseError("expected `citing cited` id pair", line_no);
        ++ds.stats.edge_lines;
        if (citing == cited) {
            ++ds.stats.self_citations_removed;
            continue;
        }
        if (!ds.dates.contains(citing)) {
            ++ds.stats.undated_citing_edges;
            continue;
        }
        ds.edges.emplace_back(citing, cited);
    }

    std::sort(ds.edges.begin(), ds.edges.end());
    const auto last = std::unique(ds.edges.begin(), ds.edges.end());
    ds.stats.duplicate_edges_removed = static_cast<Count>(ds.edges.end() - last);
    ds.edges.erase(last, ds.edges.end());
    return ds;
}

CitationDataset load_dataset(const std::filesystem::path& edge_path, const std::filesystem::path& dates_path) {
    std::ifstream edges(edge_path);
    if (!edges) throw IoError("cannot open edge file " + edge_path.string());
    std::ifstream dates(dates_path);
    if (!dates) throw IoError("cannot open dates file " + dates_path.string());
    return load_dataset(edges, dates);
}

ReplaySequence build_replay(const CitationDataset& ds, Date cutoff) {
    // Edges are sorted by citing id, so each paper's citees form a sorted run.
    std::map<PaperId, std::vector<PaperId>> citations;
    std::unordered_set<PaperId> papers;
    for (const auto& [u, v] : ds.edges) {
        citations[u].push_back(v);
        papers.insert(u);
        papers.insert(v);
    }

    std::unordered_set<PaperId> in_seed;
    for (PaperId id : papers) {
        const auto it = ds.dates.find(id);
        if (it == ds.dates.end() || it->second > cutoff) continue;
        in_seed.insert(id);
        if (const auto c = citations.find(id); c != citations.end()) in_seed.insert(c->second.begin(), c->second.end());
    }
    if (in_seed.empty()) throw DomainError("no papers dated on or before " + format_date(cutoff) + "; empty seed");

    ReplaySequence seq;
    seq.seed_ids.assign(in_seed.begin(), in_seed.end());
    std::sort(seq.seed_ids.begin(), seq.seed_ids.end());
    std::unordered_map<PaperId, NodeId> index;
    for (std::size_t i = 0; i < seq.seed_ids.size(); ++i) index.emplace(seq.seed_ids[i], static_cast<NodeId>(i));
    seq.seed.node_count = static_cast<Count>(seq.seed_ids.size());

    for (const auto& [u, vs] : citations) {
        const auto iu = index.find(u);
        if (iu != index.end()) {
            for (PaperId v : vs) {
                const auto iv = index.find(v);
                if (iv != index.end())
                    seq.seed.edges.emplace_back(iu->second, iv->second);
                else
                    ++seq.seed_external_edges;
            }
            continue;
        }
        seq.arrivals.push_back({u, ds.dates.at(u), vs});
    }
    std::sort(seq.arrivals.begin(), seq.arrivals.end(),
              [](const Arrival& a, const Arrival& b) { return a.date != b.date ? a.date < b.date : a.id < b.id; });
    return seq;
}

ReplayResult replay_to_samplelog(const ReplaySequence& seq) {
    ReplayResult result;
    std::unordered_map<PaperId, std::size_t> index;
    std::vector<Count>& in_degree = result.final_in_degrees;
    for (PaperId id : seq.seed_ids) {
        index.emplace(id, in_degree.size());
        in_degree.push_back(0);
    }
    for (const auto& [u, v] : seq.seed.edges) ++in_degree.at(static_cast<std::size_t>(v));

    Count e = static_cast<Count>(seq.seed.edges.size());
    auto node_of = [&](PaperId id) {
        auto [it, inserted] = index.try_emplace(id, in_degree.size());
        if (inserted) in_degree.push_back(0);
        return it->second;
    };

    std::vector<AttachmentRecord> step;
    std::vector<Count> citation_counts;
    citation_counts.reserve(seq.arrivals.size());
    for (const auto& arrival : seq.arrivals) {
        const Count n = static_cast<Count>(in_degree.size());
        step.clear();
        if (!arrival.citees.empty() && e == 0) throw DomainError("replay reached a citation while the graph has no edges");
        for (PaperId v : arrival.citees) {
            const auto it = index.find(v);
            step.push_back({it == index.end() ? 0 : in_degree[it->second], e, n});
        }
        result.log.push_step(step);
        node_of(arrival.id);
        for (PaperId v : arrival.citees) ++in_degree[node_of(v)];
        e += static_cast<Count>(arrival.citees.size());
        citation_counts.push_back(static_cast<Count>(arrival.citees.size()));
    }

    auto& mf = result.manifest;
    mf.seed_nodes = seq.seed.node_count;
    mf.seed_edges = static_cast<Count>(seq.seed.edges.size());
    mf.arrivals = static_cast<Count>(seq.arrivals.size());
    mf.final_nodes = static_cast<Count>(in_degree.size());
    mf.final_edges = e;
    if (!citation_counts.empty()) {
        mf.mean_citations = static_cast<double>(std::accumulate(citation_counts.begin(), citation_counts.end(), Count{0})) /
                            static_cast<double>(citation_counts.size());
        std::sort(citation_counts.begin(), citation_counts.end());
        const std::size_t mid = citation_counts.size() / 2;
        mf.median_citations = citation_counts.size() % 2 == 1
                                  ? static_cast<double>(citation_counts[mid])
                                  : 0.5 * static_cast<double>(citation_counts[mid - 1] + citation_counts[mid]);
    }
    return result;
}

}  // namespace attachmix
