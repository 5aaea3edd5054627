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

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/Polynomials>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "attachmix/netmodel.hpp"
#include "attachmix/rng.hpp"

namespace oracle {

using attachmix::AttachmentRecord;
using attachmix::Count;
using quad = boost::multiprecision::cpp_bin_float_100;
using rational = boost::multiprecision::cpp_rational;
using Poly = std::vector<rational>;  // ascending powers, no trailing zeros

inline void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(rational(static_cast<long long>(i)) * p[i]);
    trim(d);
    return d;
}

/// Quotient and remainder of polynomial division.
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
    trim(a);
    if (a.size() < b.size()) return {Poly{}, a};
    Poly q(a.size() - b.size() + 1, rational(0));
    for (std::size_t i = q.size(); i-- > 0;) {
        const rational f = a[i + b.size() - 1] / b.back();
        q[i] = f;
        for (std::size_t j = 0; j < b.size(); ++j) a[i + j] -= f * b[j];
    }
    trim(a);
    trim(q);
    return {q, a};
}

inline Poly monic(Poly p) {
    const rational lead = p.back();
    for (auto& c : p) c /= lead;
    return p;
}

inline Poly gcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

/// Exact coefficients of prod (c_i a + d_i) over non-degenerate records,
/// c_i = k/e - 1/n and d_i = 1/n.
inline Poly expanded_polynomial(const std::vector<AttachmentRecord>& records) {
    Poly poly{rational(1)};
    for (const auto& r : records) {
        if (r.k * r.n_prev == r.e_prev) continue;
        const rational c = rational(r.k * r.n_prev - r.e_prev, r.e_prev * r.n_prev);
        const rational d = rational(1, r.n_prev);
        Poly next(poly.size() + 1, rational(0));
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += d * poly[i];
            next[i + 1] += c * poly[i];
        }
        poly = std::move(next);
    }
    return poly;
}

/// Square-free decomposition p = lc * prod f_i^i; returns (f_i, i) for non-constant f_i.
inline std::vector<std::pair<Poly, int>> square_free(const Poly& p) {
    std::vector<std::pair<Poly, int>> out;
    Poly c = gcd(p, derivative(p));
    Poly w = divmod(p, c).first;
    for (int i = 1; w.size() > 1; ++i) {
        Poly y = gcd(w, c);
        Poly z = divmod(w, y).first;
        if (z.size() > 1) out.emplace_back(monic(z), i);
        w = std::move(y);
        c = divmod(c, w).first;
    }
    return out;
}

inline quad to_quad(const rational& r) {
    return quad(boost::multiprecision::numerator(r)) / quad(boost::multiprecision::denominator(r));
}

/// Real roots of a polynomial with simple real roots: companion-matrix guesses
/// from Eigen, Newton-polished in 100-digit precision.
inline std::vector<double> simple_real_roots(const Poly& p) {
    std::vector<quad> q;
    for (const auto& c : p) q.push_back(to_quad(c));
    if (q.size() == 2) return {static_cast<double>(quad(-q[0] / q[1]))};
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i) coeffs(static_cast<Eigen::Index>(i)) = static_cast<double>(quad(q[i] / q.back()));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    std::vector<double> out;
    for (const auto& z : solver.roots()) {
        quad x = z.real();
        for (int it = 0; it < 100; ++it) {
            quad v = 0, d = 0;
            for (std::size_t i = q.size(); i-- > 0;) {
                d = d * x + v;
                v = v * x + q[i];
            }
            if (d == 0) break;
            const quad step = v / d;
            x -= step;
            if (abs(step) <= quad(1e-80) * (abs(x) + quad(1e-80))) break;
        }
        out.push_back(static_cast<double>(x));
    }
    return out;
}

/// Real roots of the expanded likelihood polynomial, ascending, one entry per
/// multiplicity. Multiplicities come from an exact square-free decomposition,
/// so each factor only has simple roots.
inline std::vector<double> polynomial_real_roots(const std::vector<AttachmentRecord>& records) {
    std::vector<double> out;
    for (const auto& [factor, mult] : square_free(expanded_polynomial(records)))
        for (double r : simple_real_roots(factor)) out.insert(out.end(), static_cast<std::size_t>(mult), r);
    std::sort(out.begin(), out.end());
    return out;
}

/// Small random record multiset with repeated and degenerate records mixed in.
inline std::vector<AttachmentRecord> random_records(attachmix::Rng& rng, std::size_t max_size) {
    const std::size_t size = 1 + rng.below(max_size);
    std::vector<AttachmentRecord> recs;
    while (recs.size() < size) {
        const double u = rng.uniform();
        if (!recs.empty() && u < 0.25) {
            recs.push_back(recs[rng.below(recs.size())]);
        } else if (u < 0.35) {
            const Count n = 1 + static_cast<Count>(rng.below(20));
            const Count k = 1 + static_cast<Count>(rng.below(5));
            recs.push_back({k, k * n, n});
        } else {
            const Count e = 1 + static_cast<Count>(rng.below(80));
            const Count n = 1 + static_cast<Count>(rng.below(40));
            const Count k = static_cast<Count>(rng.below(static_cast<std::uint64_t>(e) + 1));
            recs.push_back({k, e, n});
        }
    }
    return recs;
}

// --- closed-form stationary distribution ---------------------------------

/// Gamma-function form of the stationary pmf. For alpha == 1 the first Gamma
/// argument is (m_hat + m m_hat + m) / m unless `printed_alpha1` is set.
inline double gamma_pmf(double m, double mh, double a, double k, bool printed_alpha1 = false) {
    if (a == 0.0) return (1.0 / (m + 1.0)) * std::pow(m / (m + 1.0), k - mh);
    if (a == 1.0) {
        const double g1 = printed_alpha1 ? (mh + m * mh + m) : (mh + m * mh + m) / m;
        return std::exp(std::log(m + mh) - std::log(m) + std::lgamma(g1) + std::lgamma(k) - std::lgamma(mh) -
                        std::lgamma(k + (mh + 2.0 * m) / m));
    }
    const double A = (mh + m * (1.0 + m + mh - m * a)) / (m * a);
    const double s = (m + mh) * (1.0 - a) / a;
    const double B = (m + mh - m * a) / a;
    const double C = (mh + m * (m + mh + k * a - (m + mh) * a + a + 1.0)) / (m * a);
    return std::exp(std::log(m + mh) - std::log(m * a) + std::lgamma(A) + std::lgamma(k + s) - std::lgamma(B) -
                    std::lgamma(C));
}

/// Gamma-function form of the stationary CCDF.
inline double gamma_ccdf(double m, double mh, double a, double k) {
    if (a == 0.0) return std::pow(m / (m + 1.0), k - mh);
    if (a == 1.0)
        return std::exp(std::lgamma(k) + std::lgamma((mh + m * mh + m) / m) - std::lgamma(mh) -
                        std::lgamma(k + (m + mh) / m));
    const double A = (mh + m * (1.0 + m + mh - a * m)) / (m * a);
    const double s = (m + mh) * (1.0 - a) / a;
    const double B = (mh + m * (1.0 - a)) / a;
    const double D = (mh + m * (m + mh + k * a - (m + mh) * a + 1.0)) / (m * a);
    return std::exp(std::lgamma(A) + std::lgamma(k + s) - std::lgamma(B) - std::lgamma(D));
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
