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
#include "attachmix/degree_dist.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "attachmix/error.hpp"

namespace attachmix {

StationaryDistribution::StationaryDistribution(const ModelParams& params) : params_(params) {
    params_.validate();
    if (params_.alpha == 1.0 && params_.m_hat == 0)
        throw DomainError("alpha = 1 with m_hat = 0 has no stationary in-degree law; use m_hat >= 1");
}

double StationaryDistribution::growth_rate(Count k) const {
    const auto m = static_cast<double>(params_.m);
    const auto mh = static_cast<double>(params_.m_hat);
    const double a = params_.alpha;
    return m * a * static_cast<double>(k) / (m + mh) + m * (1.0 - a);
}

double StationaryDistribution::ratio(Count k) const {
    const auto m = static_cast<double>(params_.m);
    const auto mh = static_cast<double>(params_.m_hat);
    const auto kk = static_cast<double>(k);
    const double a = params_.alpha;
    const double num = a * (kk * m - m * m - m * mh - m) + m * m + m * mh;
    const double den = a * (kk * m - m * m - m * mh) + m * m + m * mh + m + mh;
    return num / den;
}

double StationaryDistribution::base() const {
    const auto m = static_cast<double>(params_.m);
    const auto mh = static_cast<double>(params_.m_hat);
    return (m + mh) / (m * m + m * mh + m + mh - params_.alpha * m * m);
}

double StationaryDistribution::pmf(Count k) const {
    if (k < params_.m_hat) throw DomainError("in-degree below m_hat is outside the support");
    double p = base();
    for (Count j = params_.m_hat + 1; j <= k; ++j) p *= ratio(j);
    return p;
}

double StationaryDistribution::ccdf(Count k) const {
    if (k < params_.m_hat) throw DomainError("in-degree below m_hat is outside the support");
    if (k == params_.m_hat) return 1.0;
    return growth_rate(k - 1) * pmf(k - 1);
}

Eigen::VectorXd StationaryDistribution::pmf_table(Count k_max) const {
    if (k_max < params_.m_hat) throw DomainError("k_max below m_hat");
    Eigen::VectorXd table(k_max - params_.m_hat + 1);
    double p = base();
    table(0) = p;
    for (Count k = params_.m_hat + 1; k <= k_max; ++k) {
        p *= ratio(k);
        table(k - params_.m_hat) = p;
    }
    return table;
}

Eigen::VectorXd StationaryDistribution::ccdf_table(Count k_max) const {
    const Eigen::VectorXd p = pmf_table(k_max);
    Eigen::VectorXd table(p.size());
    table(0) = 1.0;
    for (Eigen::Index i = 1; i < p.size(); ++i) table(i) = growth_rate(params_.m_hat + i - 1) * p(i - 1);
    return table;
}

Count StationaryDistribution::support_for_mass(double mass) const {
    if (!(mass > 0.0 && mass < 1.0)) throw DomainError("mass must lie in (0, 1)");
    constexpr Count kLimit = 100'000'000;
    double p = base();
    for (Count k = params_.m_hat; k < params_.m_hat + kLimit; ++k) {
        if (k > params_.m_hat) p *= ratio(k);
        // sum_{j <= k} P(j) = 1 - r(k) P(k)
        if (1.0 - growth_rate(k) * p >= mass) return k;
    }
    throw DomainError("stationary tail too heavy to reach the requested mass");
}

double stationary_pmf(const ModelParams& params, Count k) { return StationaryDistribution(params).pmf(k); }
double stationary_ccdf(const ModelParams& params, Count k) { return StationaryDistribution(params).ccdf(k); }

SeedStats SeedStats::from_seed(const SeedSpec& seed) {
    SeedStats stats;
    stats.n0 = seed.node_count;
    stats.e0 = static_cast<Count>(seed.edges.size());
    std::vector<Count> in_degree(static_cast<std::size_t>(seed.node_count), 0);
    for (const auto& [u, v] : seed.edges) ++in_degree.at(static_cast<std::size_t>(v));
    const Count k_max = in_degree.empty() ? 0 : *std::max_element(in_degree.begin(), in_degree.end());
    stats.pmf = Eigen::VectorXd::Zero(k_max + 1);
    for (Count k : in_degree) stats.pmf(k) += 1.0;
    if (stats.n0 > 0) stats.pmf /= static_cast<double>(stats.n0);
    return stats;
}

ExpectedDegreeRecurrence::ExpectedDegreeRecurrence(const ModelParams& params, const SeedStats& seed, Count horizon,
                                                   const FiniteTOptions& options)
    : params_(params), options_(options), n_(seed.n0), e_(seed.e0) {
    params_.validate();
    if (seed.n0 < 1 || seed.e0 < 1) throw DomainError("seed needs at least one node and one edge");
    if (seed.pmf.size() == 0 || std::abs(seed.pmf.sum() - 1.0) > 1e-9 || seed.pmf.minCoeff() < 0.0)
        throw DomainError("seed in-degree pmf is not a probability vector");
    const Count seed_support = seed.pmf.size();
    if (options.max_support > 0) {
        cap_ = options.max_support;
    } else if (horizon > 0) {
        const auto spread = static_cast<Count>(std::ceil(20.0 * static_cast<double>(params.m) *
                                                         std::sqrt(static_cast<double>(horizon))));
        cap_ = std::max(seed_support, params.m_hat + 1 + spread);
    } else {
        cap_ = std::numeric_limits<Count>::max();
    }
    const Count initial = std::max(seed_support, params.m_hat + 2);
    if (initial > cap_) throw DomainError("support cap smaller than the seed support");
    counts_ = Eigen::VectorXd::Zero(initial);
    counts_.head(seed_support) = seed.pmf * static_cast<double>(n_);
}

void ExpectedDegreeRecurrence::step() {
    const auto m = static_cast<double>(params_.m);
    const double a = params_.alpha;
    const double inv_e = 1.0 / static_cast<double>(e_);
    const double inv_n = 1.0 / static_cast<double>(n_);
    const Eigen::Index size = counts_.size();

    // Expected attachment edges landing on nodes of each in-degree.
    const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(size, 0.0, static_cast<double>(size - 1));
    flow_ = (m * (a * k * inv_e + (1.0 - a) * inv_n) * counts_.array()).matrix();

    const double overflow = flow_(size - 1);
    counts_ -= flow_;
    counts_.tail(size - 1) += flow_.head(size - 1);
    // Grow the support while the top bin still passes non-negligible mass upward.
    if (std::abs(overflow) > 1e-20 * static_cast<double>(n_) && size < cap_) {
        counts_.conservativeResize(size + 1);
        counts_(size) = overflow;
    } else {
        leaked_ += overflow;
    }
    counts_(params_.m_hat) += 1.0;
    n_ += 1;
    e_ += params_.m + params_.m_hat;
    ++time_;
}

Eigen::VectorXd finite_t_pmf(const ModelParams& params, const SeedStats& seed, Count steps,
                             const FiniteTOptions& options) {
    if (steps < 0) throw DomainError("step count must be non-negative");
    if (steps == 0) return seed.pmf;
    ExpectedDegreeRecurrence rec(params, seed, steps, options);
    rec.advance(steps);
    if (std::abs(rec.leaked_mass()) > options.leak_tolerance)
        throw DomainError("finite-time recurrence leaked " + std::to_string(rec.leaked_mass()) +
                          " probability mass past the truncated support; widen the support");
    return rec.pmf();
}

double total_variation(const Eigen::VectorXd& pmf, const StationaryDistribution& limit) {
    const Count start = limit.support_start();
    const auto size = static_cast<Count>(pmf.size());
    double sum = 0.0;
    for (Count k = 0; k < std::min(size, start); ++k) sum += std::abs(pmf(k));
    if (size > start) {
        const Eigen::VectorXd theory = limit.pmf_table(size - 1);
        sum += (pmf.tail(size - start) - theory).cwiseAbs().sum();
    }
    sum += limit.ccdf(std::max(size, start));
    return 0.5 * sum;
}

EmpiricalDistribution empirical_distribution(std::span<const Count> in_degrees) {
    EmpiricalDistribution dist;
    for (Count k : in_degrees) ++dist.counts[k];
    dist.total = static_cast<Count>(in_degrees.size());
    return dist;
}

Eigen::VectorXd empirical_ccdf(const EmpiricalDistribution& dist) {
    if (dist.total == 0) return Eigen::VectorXd::Zero(1);
    const Count k_max = dist.counts.rbegin()->first;
    Eigen::VectorXd ccdf = Eigen::VectorXd::Zero(k_max + 2);
    for (const auto& [k, c] : dist.counts) ccdf(k) += static_cast<double>(c);
    // Suffix sums turn counts into #{v : k(v) >= k}.
    for (Count k = k_max - 1; k >= 0; --k) ccdf(k) += ccdf(k + 1);
    return ccdf / static_cast<double>(dist.total);
}

Eigen::VectorXd ensemble_mean_ccdf(const SeedSpec& seed, const ModelParams& params, Count steps, Count runs,
                                   const Rng& rng, unsigned threads, const GrowthOptions& options) {
    if (runs < 1) throw DomainError("ensemble needs at least one run");
    std::vector<Eigen::VectorXd> curves(static_cast<std::size_t>(runs));
    std::atomic<Count> next{0};
    auto worker = [&]() {
        for (Count i = next++; i < runs; i = next++) {
            Rng run_rng = rng.split(static_cast<std::uint64_t>(i));
            const auto result = grow_sequence(seed, params, steps, run_rng, options);
            curves[static_cast<std::size_t>(i)] = empirical_ccdf(empirical_distribution(result.network));
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(runs)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    Eigen::Index longest = 0;
    for (const auto& c : curves) longest = std::max(longest, c.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(longest);
    for (const auto& c : curves) mean.head(c.size()) += c;
    return mean / static_cast<double>(runs);
}

double sup_ccdf_distance(const Eigen::VectorXd& empirical, const StationaryDistribution& theory, Count k_lo,
                         Count k_hi) {
    if (k_lo < theory.support_start() || k_hi < k_lo) throw DomainError("invalid comparison range");
    const Eigen::VectorXd model = theory.ccdf_table(k_hi);
    double worst = 0.0;
    for (Count k = k_lo; k <= k_hi; ++k) {
        const double emp = k < empirical.size() ? empirical(k) : 0.0;
        worst = std::max(worst, std::abs(emp - model(k - theory.support_start())));
    }
    return worst;
}

}  // namespace attachmix
