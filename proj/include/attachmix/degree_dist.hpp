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

#include <map>
#include <span>

#include <Eigen/Core>

#include "attachmix/netmodel.hpp"

namespace attachmix {

/// Limiting in-degree distribution of the growth model.
///
/// With r(k) = m alpha k / (m + m_hat) + m (1 - alpha), the stationary pmf
/// satisfies P(m_hat) (1 + r(m_hat)) = 1 and P(k) (1 + r(k)) = r(k-1) P(k-1)
/// for k > m_hat. Values come from the product of successive ratios, and the
/// CCDF uses the telescoped identity ccdf(k) = r(k-1) P(k-1), which avoids the
/// cancellation in 1 - sum_{j<k} P(j).
///
/// alpha = 1 with m_hat = 0 is rejected: every new node then has in-degree 0
/// and can never be chosen.
class StationaryDistribution {
public:
    explicit StationaryDistribution(const ModelParams& params);

    const ModelParams& params() const { return params_; }
    Count support_start() const { return params_.m_hat; }

    /// Expected number of attachment edges a node of in-degree k receives per step, in the limit.
    double growth_rate(Count k) const;
    /// P(k) / P(k - 1) for k > m_hat.
    double ratio(Count k) const;
    /// P(m_hat) = (m + m_hat) / (m^2 + m m_hat + m + m_hat - alpha m^2).
    double base() const;

    double pmf(Count k) const;
    double ccdf(Count k) const;

    /// P(m_hat..k_max) as a vector indexed from m_hat.
    Eigen::VectorXd pmf_table(Count k_max) const;
    /// ccdf(m_hat..k_max) as a vector indexed from m_hat.
    Eigen::VectorXd ccdf_table(Count k_max) const;

    /// Smallest K with sum_{k=m_hat}^{K} P(k) >= mass.
    Count support_for_mass(double mass) const;
    /// Smallest k with P(K <= k) >= q.
    Count quantile(double q) const { return support_for_mass(q); }

private:
    ModelParams params_;
};

double stationary_pmf(const ModelParams& params, Count k);
double stationary_ccdf(const ModelParams& params, Count k);

/// Seed summary for the finite-time recurrence.
struct SeedStats {
    Count n0 = 0;
    Count e0 = 0;
    /// pmf(k) for k = 0..max in-degree of the seed.
    Eigen::VectorXd pmf;

    static SeedStats from_seed(const SeedSpec& seed);
};

struct FiniteTOptions {
    /// Largest tolerated probability mass pushed past the truncated support.
    double leak_tolerance = 1e-9;
    /// Hard cap on the support; 0 selects max(seed support, m_hat + 20 m sqrt(T)).
    Count max_support = 0;
};

/// Expected in-degree distribution P_t iterated step by step.
///
/// Expected counts N_t(k) = n_t P_t(k) evolve as
///   N_t(k) = N_{t-1}(k) - m pi_t(k) N_{t-1}(k) + m pi_t(k-1) N_{t-1}(k-1) + [k == m_hat],
/// with pi_t(k) = alpha k / e_{t-1} + (1 - alpha) / n_{t-1}. The support grows
/// on demand; mass that would move past the cap is counted as leaked.
class ExpectedDegreeRecurrence {
public:
    ExpectedDegreeRecurrence(const ModelParams& params, const SeedStats& seed, Count horizon = 0,
                             const FiniteTOptions& options = {});

    void step();
    void advance(Count steps) {
        for (Count i = 0; i < steps; ++i) step();
    }

    Count time() const { return time_; }
    double leaked_mass() const { return leaked_ / static_cast<double>(n_); }
    /// P_t(k) for k = 0..support-1.
    Eigen::VectorXd pmf() const { return counts_ / static_cast<double>(n_); }

private:
    ModelParams params_;
    FiniteTOptions options_;
    Count cap_;
    Count n_;
    Count e_;
    Count time_ = 0;
    double leaked_ = 0.0;
    Eigen::VectorXd counts_;
    Eigen::VectorXd flow_;
};

/// P_T after T steps of the expectation recurrence. Throws DomainError asking
/// for a wider support when more than options.leak_tolerance mass leaked.
Eigen::VectorXd finite_t_pmf(const ModelParams& params, const SeedStats& seed, Count steps,
                             const FiniteTOptions& options = {});

/// Total-variation distance between a pmf on 0..size-1 and the stationary law.
double total_variation(const Eigen::VectorXd& pmf, const StationaryDistribution& limit);

struct EmpiricalDistribution {
    std::map<Count, Count> counts;
    Count total = 0;
};

EmpiricalDistribution empirical_distribution(std::span<const Count> in_degrees);
inline EmpiricalDistribution empirical_distribution(const GrowingNetwork& net) {
    return empirical_distribution(net.in_degrees());
}

/// ccdf(k) = #{v : k(v) >= k} / n for k = 0..max+1 (the last entry is 0).
Eigen::VectorXd empirical_ccdf(const EmpiricalDistribution& dist);

/// Pointwise mean of the empirical CCDFs of `runs` independent growths.
/// Run i uses rng.split(i), so the result does not depend on `threads`.
Eigen::VectorXd ensemble_mean_ccdf(const SeedSpec& seed, const ModelParams& params, Count steps, Count runs,
                                   const Rng& rng, unsigned threads = 1, const GrowthOptions& options = {});

/// max |empirical(k) - theory.ccdf(k)| over k in [k_lo, k_hi]; empirical
/// entries past its end count as 0.
double sup_ccdf_distance(const Eigen::VectorXd& empirical, const StationaryDistribution& theory, Count k_lo,
                         Count k_hi);

}  // namespace attachmix
