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

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "attachmix/netmodel.hpp"

namespace attachmix {

/// Handling of records whose target had in-degree 0. Their responsibility is
/// always 0, so keeping them only drags the mean toward 0.
enum class ZeroInDegree { kDrop, kKeep };

struct EmConfig {
    double alpha_init = 0.5;
    double epsilon = 1e-8;
    int max_iter = 10000;
    ZeroInDegree zero_in_degree = ZeroInDegree::kDrop;
    /// Largest tolerated decrease of the incomplete log-likelihood between iterates.
    double divergence_guard = 1e-9;
    /// Evaluate the incomplete log-likelihood at every iterate (and enforce the
    /// divergence guard). Prefix traces that only need the end point turn it off;
    /// the recorded log-likelihoods are then NaN.
    bool track_log_likelihood = true;

    void validate() const;
};

struct EmIterate {
    double alpha = 0.0;
    double log_likelihood = 0.0;
};

struct EmTrace {
    /// iterations[0] is the starting point; each later entry is one EM update.
    std::vector<EmIterate> iterations;
    bool converged = false;
    double final_alpha = 0.0;
    Count records_used = 0;
    Count records_dropped = 0;

    /// Number of EM updates performed.
    std::size_t updates() const { return iterations.empty() ? 0 : iterations.size() - 1; }
};

/// Component densities of a record: preferential k / e_prev, random 1 / n_prev.
template <typename Scalar>
struct MixtureComponents {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    Array preferential;
    Array random;

    static MixtureComponents from_records(RecordSpan records) {
        MixtureComponents c;
        const auto n = static_cast<Eigen::Index>(records.size());
        c.preferential.resize(n);
        c.random.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& r = records[static_cast<std::size_t>(i)];
            c.preferential(i) = static_cast<Scalar>(r.k) / static_cast<Scalar>(r.e_prev);
            c.random(i) = Scalar(1) / static_cast<Scalar>(r.n_prev);
        }
        return c;
    }

    Array responsibilities(Scalar alpha) const {
        const Array weighted = alpha * preferential;
        return weighted / (weighted + (Scalar(1) - alpha) * random);
    }
};

/// Posterior probability that the record's edge came from preferential attachment.
/// Throws EvaluationError when the mixture density is zero (k = 0 with alpha = 1).
double responsibility(const AttachmentRecord& record, double alpha);

/// One EM update: the mean responsibility over all records.
double em_step(RecordSpan records, double alpha);

/// EM iteration from cfg.alpha_init until |delta alpha| < epsilon or max_iter.
EmTrace em_estimate(RecordSpan records, const EmConfig& cfg = {});
inline EmTrace em_estimate(const SampleLog& log, const EmConfig& cfg = {}) { return em_estimate(log.records(), cfg); }

/// Records that EM consumes under the given policy.
std::vector<AttachmentRecord> em_input(RecordSpan records, ZeroInDegree policy);

/// CSV `iter,alpha,loglik`; iteration 0 is the starting point.
void write_em_trace_csv(std::ostream& out, const EmTrace& trace);

}  // namespace attachmix
