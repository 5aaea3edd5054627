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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attachmix/error.hpp"
#include "attachmix/likelihood.hpp"
#include "oracles.hpp"

using namespace attachmix;

namespace {

RootProfile profile_of(std::initializer_list<AttachmentRecord> recs) {
    const std::vector<AttachmentRecord> v(recs);
    return root_profile(v);
}

std::vector<double> expand(const RootProfile& p) {
    std::vector<double> out;
    for (const auto& r : p.roots) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.value);
    return out;
}

SampleLog simulated(double alpha, Count steps, std::uint64_t seed, Count m = 5, Count m_hat = 3) {
    Rng rng(seed);
    return grow_sequence(SeedSpec::complete(3), {m, m_hat, alpha}, steps, rng).log;
}

}  // namespace

TEST_CASE("log-likelihood of single records") {
    const std::vector<AttachmentRecord> one{{2, 4, 4}};
    CHECK(log_likelihood(one, 0.5) == doctest::Approx(std::log(0.375)).epsilon(1e-14));
    const std::vector<AttachmentRecord> degenerate{{2, 10, 5}};
    for (double a : {0.0, 0.4, 1.0}) CHECK(log_likelihood(degenerate, a) == doctest::Approx(std::log(0.2)));
    const std::vector<AttachmentRecord> recs{{1, 10, 5}, {3, 10, 5}, {0, 7, 4}};
    CHECK(log_likelihood(recs, 0.0) == doctest::Approx(2 * std::log(0.2) + std::log(0.25)).epsilon(1e-14));
    CHECK(snapshot_log_likelihood({}, 0.3) == 0.0);
}

TEST_CASE("non-positive factors raise an evaluation error naming the record") {
    const std::vector<AttachmentRecord> recs{{2, 4, 4}, {0, 10, 5}};
    try {
        log_likelihood(recs, 1.0);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.record_index() == 1);
    }
}

TEST_CASE("per-record roots") {
    CHECK(*record_root({1, 10, 5}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(*record_root({3, 10, 5}) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK_FALSE(record_root({2, 10, 5}).has_value());
    const auto p = profile_of({{1, 10, 5}, {1, 10, 5}, {3, 10, 5}, {2, 10, 5}});
    REQUIRE(p.roots.size() == 2);
    CHECK(p.roots[0].value == doctest::Approx(-2.0));
    CHECK(p.roots[1].multiplicity == 2);
    CHECK(p.degenerate_count == 1);
    CHECK(p.degree() == 3);
    CHECK(p.positive_multiplicity() == 2);
    CHECK(*p.max_negative() == doctest::Approx(-2.0));
    CHECK(*p.min_positive() == doctest::Approx(2.0));
}

TEST_CASE("bracketing condition clauses") {
    auto sat = check_theorem1(profile_of({{1, 10, 5}, {1, 10, 5}, {3, 10, 5}}));
    CHECK(sat.satisfied);
    auto odd = check_theorem1(profile_of({{1, 10, 5}, {3, 10, 5}}));
    CHECK_FALSE(odd.satisfied);
    CHECK(odd.has_positive);
    CHECK(odd.has_negative);
    CHECK_FALSE(odd.positive_parity_even);
    auto no_neg = check_theorem1(profile_of({{1, 10, 5}, {1, 10, 5}}));
    CHECK_FALSE(no_neg.satisfied);
    CHECK_FALSE(no_neg.has_negative);
    auto no_pos = check_theorem1(profile_of({{3, 10, 5}}));
    CHECK_FALSE(no_pos.satisfied);
    CHECK_FALSE(no_pos.has_positive);
    CHECK_FALSE(no_pos.detail.empty());
}

TEST_CASE("root profile agrees with a generic polynomial root finder") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto recs = oracle::random_records(rng, 12);
        const auto ours = expand(root_profile(recs));
        const auto ref = oracle::polynomial_real_roots(recs);
        REQUIRE(ours.size() == ref.size());
        for (std::size_t i = 0; i < ours.size(); ++i) CHECK(oracle::rel_diff(ours[i], ref[i]) <= 1e-9);
    }
}

TEST_CASE("two-record log has a closed-form maximizer") {
    // Factors 0.2a + 0.2 and -0.15a + 0.25; the derivative vanishes at -(c1 d2 + c2 d1) / (2 c1 c2).
    const std::vector<AttachmentRecord> recs{{4, 10, 5}, {1, 10, 4}};
    const double c1 = 0.2, d1 = 0.2, c2 = -0.15, d2 = 0.25;
    const double expected = -(c1 * d2 + c2 * d1) / (2 * c1 * c2);
    CHECK(expected == doctest::Approx(1.0 / 3.0));
    const auto rep = mle_estimate(recs);
    CHECK(rep.alpha_hat == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rep.bracket_lo == doctest::Approx(-1.0));
    CHECK(rep.bracket_hi == doctest::Approx(5.0 / 3.0));
    CHECK_FALSE(rep.theorem1_satisfied);
}

TEST_CASE("logs without information are rejected") {
    CHECK_THROWS_AS(mle_estimate(std::vector<AttachmentRecord>{}), NoInformationError);
    CHECK_THROWS_AS(mle_estimate(std::vector<AttachmentRecord>{{2, 10, 5}, {1, 4, 4}}), NoInformationError);
}

TEST_CASE("log-likelihood is additive over steps") {
    const auto log = simulated(0.6, 300, 8);
    for (double a : {0.1, 0.6, 0.95}) {
        double sum = 0.0;
        for (std::size_t t = 1; t <= log.steps(); ++t) sum += snapshot_log_likelihood(log.step(t), a);
        CHECK(log_likelihood(log, a) == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("log-likelihood is concave on the unit interval") {
    Rng rng(31);
    const auto log = simulated(0.4, 200, 9);
    for (int i = 0; i < 200; ++i) {
        const double a = 0.001 + 0.998 * rng.uniform(), b = 0.001 + 0.998 * rng.uniform(), l = rng.uniform();
        const double mid = l * a + (1 - l) * b;
        CHECK(log_likelihood(log, mid) >= l * log_likelihood(log, a) + (1 - l) * log_likelihood(log, b) - 1e-9);
    }
}

TEST_CASE("analytic derivative agrees with finite differences") {
    const auto log = simulated(0.6, 200, 10);
    const auto terms = AttachmentTerms<double>::from_records(log.records());
    for (int i = 0; i < 100; ++i) {
        const double a = 0.01 + 0.98 * i / 99.0, h = 1e-6;
        const double fd = (log_likelihood(terms, a + h) - log_likelihood(terms, a - h)) / (2 * h);
        const double d = log_likelihood_derivative(terms, a);
        CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)) * 10);
        CHECK(log_likelihood_curvature(terms, a) <= 0.0);
    }
}

TEST_CASE("estimate is invariant under record permutation") {
    auto log = simulated(0.6, 400, 12);
    std::vector<AttachmentRecord> recs(log.records().begin(), log.records().end());
    const double a = mle_estimate(recs).alpha_hat;
    Rng rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        for (std::size_t i = recs.size(); i > 1; --i) std::swap(recs[i - 1], recs[rng.below(i)]);
        CHECK(mle_estimate(recs).alpha_hat == doctest::Approx(a).epsilon(1e-9));
    }
}

TEST_CASE("estimate maximizes the log-likelihood") {
    const auto log = simulated(0.6, 2000, 13);
    const auto rep = mle_estimate(log);
    CHECK(rep.theorem1_satisfied);
    CHECK(rep.alpha_hat > 0.4);
    CHECK(rep.alpha_hat < 0.8);
    CHECK(rep.log_likelihood == doctest::Approx(log_likelihood(log, rep.alpha_hat)));
    for (double d : {-1e-3, 1e-3}) CHECK(log_likelihood(log, rep.alpha_hat + d) <= rep.log_likelihood);
}

TEST_CASE("root tracker matches the batch profile on every prefix") {
    const auto log = simulated(0.5, 300, 14, 3, 1);
    RootTracker tracker;
    for (std::size_t t = 1; t <= log.steps(); ++t) {
        tracker.add(log.step(t));
        if (t % 25) continue;
        const auto prof = root_profile(log.prefix(t));
        CHECK(tracker.degenerate_count() == prof.degenerate_count);
        CHECK(tracker.positive_count() == prof.positive_multiplicity());
        if (prof.min_positive()) CHECK(tracker.min_positive() == doctest::Approx(*prof.min_positive()));
        if (prof.max_negative()) CHECK(tracker.max_negative() == doctest::Approx(*prof.max_negative()));
        CHECK(tracker.theorem1().satisfied == check_theorem1(prof).satisfied);
        CHECK(mle_estimate(log.prefix(t), tracker).alpha_hat == doctest::Approx(mle_estimate(log.prefix(t)).alpha_hat));
    }
}

TEST_CASE("smallest positive root approaches 1 + 1/(m + m_hat - 1) when m_hat = 1") {
    const auto log = simulated(0.6, 20000, 15, 5, 1);
    const auto prof = root_profile(log.records());
    REQUIRE(prof.min_positive());
    CHECK(std::abs(*prof.min_positive() - 1.2) < 1e-3);
}

TEST_CASE("smallest positive root settles at (m + m_hat) / m when m_hat = 3") {
    // Targets then always carry in-degree >= 2, so the k = 1 roots never appear.
    const auto log = simulated(0.6, 20000, 16);
    const auto prof = root_profile(log.records());
    REQUIRE(prof.min_positive());
    CHECK(std::abs(*prof.min_positive() - 1.6) < 1e-3);
}
