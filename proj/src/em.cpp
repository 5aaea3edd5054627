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
#include "attachmix/em.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "attachmix/error.hpp"
#include "attachmix/likelihood.hpp"

namespace attachmix {

void EmConfig::validate() const {
    if (!(alpha_init > 0.0 && alpha_init < 1.0)) throw DomainError("EM start must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw DomainError("EM epsilon must be positive");
    if (max_iter < 1) throw DomainError("EM max_iter must be positive");
}

double responsibility(const AttachmentRecord& record, double alpha) {
    const double preferential = alpha * static_cast<double>(record.k) / static_cast<double>(record.e_prev);
    const double denominator = preferential + (1.0 - alpha) / static_cast<double>(record.n_prev);
    if (!(denominator > 0.0))
        throw EvaluationError("zero mixture density for k = " + std::to_string(record.k) +
                                  " at alpha = " + std::to_string(alpha),
                              0);
    return preferential / denominator;
}

namespace {

double mean_responsibility(const MixtureComponents<double>& c, double alpha) {
    const Eigen::ArrayXd density = alpha * c.preferential + (1.0 - alpha) * c.random;
    Eigen::Index worst = 0;
    if (!(density.minCoeff(&worst) > 0.0))
        throw EvaluationError("zero mixture density at record " + std::to_string(worst), static_cast<std::size_t>(worst));
    return (alpha * c.preferential / density).mean();
}

}  // namespace

double em_step(RecordSpan records, double alpha) {
    if (records.empty()) throw NoInformationError("EM needs at least one record");
    return mean_responsibility(MixtureComponents<double>::from_records(records), alpha);
}

std::vector<AttachmentRecord> em_input(RecordSpan records, ZeroInDegree policy) {
    std::vector<AttachmentRecord> kept;
    kept.reserve(records.size());
    for (const auto& r : records)
        if (policy == ZeroInDegree::kKeep || r.k > 0) kept.push_back(r);
    return kept;
}

EmTrace em_estimate(RecordSpan records, const EmConfig& cfg) {
    cfg.validate();
    const auto kept = em_input(records, cfg.zero_in_degree);
    if (kept.empty()) throw NoInformationError("no records left for EM");

    EmTrace trace;
    trace.records_used = static_cast<Count>(kept.size());
    trace.records_dropped = static_cast<Count>(records.size() - kept.size());

    const auto components = MixtureComponents<double>::from_records(kept);
    const auto terms = cfg.track_log_likelihood ? AttachmentTerms<double>::from_records(kept) : AttachmentTerms<double>{};

    double alpha = cfg.alpha_init;
    const bool track = cfg.track_log_likelihood;
    double loglik = track ? log_likelihood(terms, alpha) : std::numeric_limits<double>::quiet_NaN();
    trace.iterations.push_back({alpha, loglik});
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double next = mean_responsibility(components, alpha);
        const double next_loglik = track ? log_likelihood(terms, next) : std::numeric_limits<double>::quiet_NaN();
        if (track && next_loglik < loglik - cfg.divergence_guard)
            throw std::logic_error("EM decreased the log-likelihood from " + std::to_string(loglik) + " to " +
                                   std::to_string(next_loglik) + " at iteration " + std::to_string(iter + 1));
        trace.iterations.push_back({next, next_loglik});
        const double delta = std::abs(next - alpha);
        alpha = next;
        loglik = next_loglik;
        if (delta < cfg.epsilon) {
            trace.converged = true;
            break;
        }
    }
    trace.final_alpha = alpha;
    return trace;
}

void write_em_trace_csv(std::ostream& out, const EmTrace& trace) {
    out << "iter,alpha,loglik\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.iterations.size(); ++i)
        out << i << ',' << trace.iterations[i].alpha << ',' << trace.iterations[i].log_likelihood << '\n';
}

}  // namespace attachmix
