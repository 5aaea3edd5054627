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
#include "attachmix/likelihood.hpp"

#include <algorithm>

namespace attachmix {

double log_likelihood(RecordSpan records, double alpha) {
    return log_likelihood(AttachmentTerms<double>::from_records(records), alpha);
}

double snapshot_log_likelihood(RecordSpan step, double alpha) {
    if (step.empty()) return 0.0;
    return log_likelihood(step, alpha);
}

std::optional<double> record_root(const AttachmentRecord& r) {
    const Count denominator = r.e_prev - r.k * r.n_prev;
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(r.e_prev) / static_cast<double>(denominator);
}

std::span<const Root> RootProfile::negative() const {
    const auto split = std::partition_point(roots.begin(), roots.end(), [](const Root& r) { return r.value < 0; });
    return {roots.data(), static_cast<std::size_t>(split - roots.begin())};
}

std::span<const Root> RootProfile::positive() const {
    const auto neg = negative().size();
    return std::span<const Root>(roots).subspan(neg);
}

Count RootProfile::positive_multiplicity() const {
    Count total = 0;
    for (const auto& r : positive()) total += r.multiplicity;
    return total;
}

std::optional<double> RootProfile::max_negative() const {
    const auto neg = negative();
    if (neg.empty()) return std::nullopt;
    return neg.back().value;
}

std::optional<double> RootProfile::min_positive() const {
    const auto pos = positive();
    if (pos.empty()) return std::nullopt;
    return pos.front().value;
}

RootProfile root_profile(RecordSpan records) {
    RootProfile profile;
    profile.record_count = static_cast<Count>(records.size());
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
        if (const auto root = record_root(r))
            values.push_back(*root);
        else
            ++profile.degenerate_count;
    }
    std::sort(values.begin(), values.end());
    for (double v : values) {
        if (!profile.roots.empty()) {
            auto& last = profile.roots.back();
            if (std::abs(v - last.value) <= kRootMergeTolerance * std::max(std::abs(v), std::abs(last.value))) {
                ++last.multiplicity;
                continue;
            }
        }
        profile.roots.push_back({v, 1});
    }
    return profile;
}

Theorem1Check check_theorem1(bool has_positive, bool has_negative, Count positive_multiplicity) {
    Theorem1Check check;
    check.has_positive = has_positive;
    check.has_negative = has_negative;
    check.positive_parity_even = positive_multiplicity % 2 == 0;
    check.satisfied = has_positive && has_negative && check.positive_parity_even;
    if (!has_positive)
        check.detail = "no positive roots";
    else if (!has_negative)
        check.detail = "no negative roots";
    else if (!check.positive_parity_even)
        check.detail = "odd total multiplicity of positive roots (" + std::to_string(positive_multiplicity) + ")";
    else
        check.detail = "satisfied";
    return check;
}

Theorem1Check check_theorem1(const RootProfile& profile) {
    return check_theorem1(!profile.positive().empty(), !profile.negative().empty(),
                          profile.positive_multiplicity());
}

double maximize_log_likelihood(const AttachmentTerms<double>& terms, double lo, double hi,
                               const MleOptions& options) {
    double left = std::max(lo, 0.0) + options.margin;
    double right = std::min(hi, 1.0) - options.margin;
    if (!(left < right)) throw DomainError("empty maximization interval");
    if (log_likelihood_derivative(terms, left) <= 0.0) return left;
    if (log_likelihood_derivative(terms, right) >= 0.0) return right;
    while (right - left > options.tolerance) {
        const double mid = 0.5 * (left + right);
        if (log_likelihood_derivative(terms, mid) > 0.0)
            left = mid;
        else
            right = mid;
    }
    return 0.5 * (left + right);
}

namespace {

MleReport finish_report(const AttachmentTerms<double>& terms, double lo, double hi, const Theorem1Check& check,
                        Count positive_multiplicity, const MleOptions& options) {
    MleReport report;
    report.bracket_lo = lo;
    report.bracket_hi = hi;
    report.theorem1_satisfied = check.satisfied;
    report.positive_multiplicity = positive_multiplicity;
    report.detail = check.detail;
    report.alpha_hat = maximize_log_likelihood(terms, lo, hi, options);
    report.log_likelihood = log_likelihood(terms, report.alpha_hat);
    return report;
}

}  // namespace

MleReport mle_estimate(RecordSpan records, const MleOptions& options) {
    RootTracker roots;
    roots.add(records);
    return mle_estimate(records, roots, options);
}

MleReport mle_estimate(RecordSpan records, const RootTracker& roots, const MleOptions& options) {
    if (records.empty()) throw NoInformationError("empty sample log");
    if (roots.degenerate_count() == static_cast<Count>(records.size()))
        throw NoInformationError("every record is degenerate; the likelihood does not depend on alpha");
    const auto terms = AttachmentTerms<double>::from_records(records);
    return finish_report(terms, roots.max_negative(), roots.min_positive(), roots.theorem1(), roots.positive_count(),
                         options);
}

void RootTracker::add(const AttachmentRecord& r) {
    const auto root = record_root(r);
    if (!root) {
        ++degenerate_;
    } else if (*root > 0) {
        ++positive_;
        min_positive_ = std::min(min_positive_, *root);
    } else {
        ++negative_;
        max_negative_ = std::max(max_negative_, *root);
    }
}

}  // namespace attachmix
