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

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "attachmix/error.hpp"
#include "attachmix/netmodel.hpp"

namespace attachmix {

/// Each record contributes the linear factor slope * alpha + intercept to the
/// likelihood, with slope = k / e_prev - 1 / n_prev and intercept = 1 / n_prev.
/// The slope is formed from the exact integer numerator k * n_prev - e_prev, so
/// degenerate records (k * n_prev == e_prev) get a slope of exactly zero.
template <typename Scalar>
struct AttachmentTerms {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    Array slope;
    Array intercept;

    static AttachmentTerms from_records(RecordSpan records) {
        AttachmentTerms terms;
        const auto n = static_cast<Eigen::Index>(records.size());
        terms.slope.resize(n);
        terms.intercept.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& r = records[static_cast<std::size_t>(i)];
            const Scalar e = static_cast<Scalar>(r.e_prev);
            const Scalar nodes = static_cast<Scalar>(r.n_prev);
            terms.slope(i) = static_cast<Scalar>(r.k * r.n_prev - r.e_prev) / (e * nodes);
            terms.intercept(i) = Scalar(1) / nodes;
        }
        return terms;
    }

    Eigen::Index size() const { return slope.size(); }
};

namespace detail {

// Neumaier compensated sum; the EM monotonicity checks compare log-likelihoods
// that differ in the last few ulps.
template <typename Derived>
typename Derived::Scalar compensated_sum(const Eigen::ArrayBase<Derived>& xs) {
    using Scalar = typename Derived::Scalar;
    Scalar sum(0), carry(0);
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const Scalar x = xs(i);
        const Scalar t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    return sum + carry;
}

template <typename Scalar>
void require_positive_factors(const typename AttachmentTerms<Scalar>::Array& factors, Scalar alpha) {
    Eigen::Index worst = 0;
    if (factors.size() > 0 && !(factors.minCoeff(&worst) > Scalar(0)))
        throw EvaluationError("likelihood factor of record " + std::to_string(worst) +
                                  " is non-positive at alpha = " + std::to_string(static_cast<double>(alpha)),
                              static_cast<std::size_t>(worst));
}

}  // namespace detail

/// Sum of log factors. Throws EvaluationError naming the first offending record
/// if any factor is non-positive at `alpha`.
template <typename Scalar>
Scalar log_likelihood(const AttachmentTerms<Scalar>& terms, Scalar alpha) {
    const typename AttachmentTerms<Scalar>::Array factors = alpha * terms.slope + terms.intercept;
    detail::require_positive_factors<Scalar>(factors, alpha);
    return detail::compensated_sum(factors.log());
}

/// First derivative of log_likelihood in alpha.
template <typename Scalar>
Scalar log_likelihood_derivative(const AttachmentTerms<Scalar>& terms, Scalar alpha) {
    return (terms.slope / (alpha * terms.slope + terms.intercept)).sum();
}

/// Second derivative; never positive, so the log-likelihood is concave wherever it is finite.
template <typename Scalar>
Scalar log_likelihood_curvature(const AttachmentTerms<Scalar>& terms, Scalar alpha) {
    return -(terms.slope / (alpha * terms.slope + terms.intercept)).square().sum();
}

double log_likelihood(RecordSpan records, double alpha);
inline double log_likelihood(const SampleLog& log, double alpha) { return log_likelihood(log.records(), alpha); }

/// Log-likelihood of a single step's multiset; the empty multiset gives 0.
double snapshot_log_likelihood(RecordSpan step, double alpha);

/// Root of the factor contributed by one record, or nullopt for degenerate records.
std::optional<double> record_root(const AttachmentRecord& r);

struct Root {
    double value = 0.0;
    Count multiplicity = 0;
};

/// Real roots of the likelihood polynomial, merged by value.
struct RootProfile {
    std::vector<Root> roots;  // ascending by value; no root is ever zero
    Count degenerate_count = 0;
    Count record_count = 0;

    std::span<const Root> negative() const;
    std::span<const Root> positive() const;
    Count degree() const { return record_count - degenerate_count; }
    Count positive_multiplicity() const;
    std::optional<double> max_negative() const;
    std::optional<double> min_positive() const;
};

/// Relative tolerance for merging roots into one value with multiplicity.
inline constexpr double kRootMergeTolerance = 1e-12;

RootProfile root_profile(RecordSpan records);

struct Theorem1Check {
    bool satisfied = false;
    bool has_positive = false;
    bool has_negative = false;
    bool positive_parity_even = false;
    std::string detail;
};

/// Sufficient condition for an interior local maximum bracketed by the largest
/// negative and smallest positive root: both root sets non-empty and an even
/// total multiplicity of positive roots.
Theorem1Check check_theorem1(const RootProfile& profile);
Theorem1Check check_theorem1(bool has_positive, bool has_negative, Count positive_multiplicity);

struct MleOptions {
    /// Margin kept from the bracket endpoints and from {0, 1}.
    double margin = 1e-9;
    /// Bisection stops once the interval is narrower than this.
    double tolerance = 1e-10;
};

struct MleReport {
    double alpha_hat = 0.0;
    /// Largest negative root (-inf if none) and smallest positive root (+inf if none).
    double bracket_lo = -std::numeric_limits<double>::infinity();
    double bracket_hi = std::numeric_limits<double>::infinity();
    bool theorem1_satisfied = false;
    Count positive_multiplicity = 0;
    double log_likelihood = 0.0;
    std::string detail;

    bool positive_parity_even() const { return positive_multiplicity % 2 == 0; }
};

/// Maximizer of the strictly concave log-likelihood on
/// (max(lo, 0) + margin, min(hi, 1) - margin), by bisection on the sign of
/// the derivative. Returns an endpoint when the derivative does not change sign.
double maximize_log_likelihood(const AttachmentTerms<double>& terms, double lo, double hi,
                               const MleOptions& options = {});

/// Maximum-likelihood estimate of alpha over (0, 1). The estimate is returned
/// even when the bracketing condition fails; the report flags it.
/// Throws NoInformationError when every record is degenerate.
MleReport mle_estimate(RecordSpan records, const MleOptions& options = {});
inline MleReport mle_estimate(const SampleLog& log, const MleOptions& options = {}) {
    return mle_estimate(log.records(), options);
}

/// Running root bookkeeping for prefix re-estimation: O(1) per appended record.
class RootTracker {
public:
    void add(const AttachmentRecord& r);
    void add(RecordSpan records) {
        for (const auto& r : records) add(r);
    }

    Count positive_count() const { return positive_; }
    Count negative_count() const { return negative_; }
    Count degenerate_count() const { return degenerate_; }
    double min_positive() const { return min_positive_; }
    double max_negative() const { return max_negative_; }
    Theorem1Check theorem1() const { return check_theorem1(positive_ > 0, negative_ > 0, positive_); }

private:
    Count positive_ = 0;
    Count negative_ = 0;
    Count degenerate_ = 0;
    double min_positive_ = std::numeric_limits<double>::infinity();
    double max_negative_ = -std::numeric_limits<double>::infinity();
};

/// MLE on a record range whose root bookkeeping is already known.
MleReport mle_estimate(RecordSpan records, const RootTracker& roots, const MleOptions& options = {});

}  // namespace attachmix
