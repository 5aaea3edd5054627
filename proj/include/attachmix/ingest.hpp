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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "attachmix/netmodel.hpp"

namespace attachmix {

using PaperId = std::uint64_t;

/// Calendar date as days since 1970-01-01.
using Date = std::int32_t;

/// Parses `YYYY-MM-DD`; throws DomainError on malformed or impossible dates.
Date parse_date(std::string_view text);
std::string format_date(Date date);

struct LoadStats {
    Count edge_lines = 0;
    Count self_citations_removed = 0;
    Count duplicate_edges_removed = 0;
    /// Edges dropped because the citing paper has no date.
    Count undated_citing_edges = 0;
    /// Dates listed more than once for the same id; the earliest is kept.
    Count duplicate_dates = 0;
};

/// Citation edges (citing, cited) with publication dates.
struct CitationDataset {
    std::vector<std::pair<PaperId, PaperId>> edges;
    std::unordered_map<PaperId, Date> dates;
    LoadStats stats;

    /// Distinct ids among the edges.
    Count paper_count() const;
};

/// Edge text: whitespace-separated `citing cited` id pairs, `#` comments.
/// Dates text: `id<TAB>YYYY-MM-DD`, `#` comments. Ids are decimal integers, so
/// leading zeros are insignificant. Self-citations and repeated pairs are
/// removed; edges whose citing paper is undated are dropped. All removals are
/// counted in `stats`.
CitationDataset load_dataset(std::istream& edges, std::istream& dates);
CitationDataset load_dataset(const std::filesystem::path& edge_path, const std::filesystem::path& dates_path);

struct Arrival {
    PaperId id = 0;
    Date date = 0;
    std::vector<PaperId> citees;  // ascending
};

/// Seed graph plus the time-ordered arrivals that grow it.
struct ReplaySequence {
    std::vector<PaperId> seed_ids;  // seed node i carries seed_ids[i]
    SeedSpec seed;
    std::vector<Arrival> arrivals;  // ascending by (date, id)
    /// Citations made by seed nodes to papers outside the seed; not replayed.
    Count seed_external_edges = 0;
};

/// Seed: papers dated on or before `cutoff` plus everything they cite, with
/// all citations among them. Arrivals: the remaining citing papers in
/// ascending date order, ties broken by ascending id.
ReplaySequence build_replay(const CitationDataset& ds, Date cutoff);

struct ReplayManifest {
    Count seed_nodes = 0;
    Count seed_edges = 0;
    Count arrivals = 0;
    Count final_nodes = 0;
    Count final_edges = 0;
    double mean_citations = 0.0;
    double median_citations = 0.0;
};

struct ReplayResult {
    SampleLog log;
    /// In-degrees of the final replayed graph.
    std::vector<Count> final_in_degrees;
    ReplayManifest manifest;
};

/// Replays the arrivals in order. Arrival t contributes one record per citation:
/// the citee's in-degree before the arrival (0 for papers first seen now) and
/// the node and edge counts before the arrival's nodes and edges are added.
ReplayResult replay_to_samplelog(const ReplaySequence& seq);

}  // namespace attachmix
