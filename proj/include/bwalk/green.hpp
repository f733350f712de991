#pragma once

// Green function G(0, x; z) = sum_n p^n(0, x) z^n from partial sums of the radial chain.
//
// Subcritical z: the sum stops once a rigorous tail bound falls below rel_tol times the
// partial sum. Shifting the inversion contour to a real point s of the closed chamber gives
//   p^n(0, x) <= K(s) (rho h(s))^n,
//   K(s) = q^{-E(lambda)/2} e^{-<lambda + rho_P, s>} prod_{alpha > 0} 2 cosh(<alpha, s>/2) / (1 - q^{-1} e^{-<alpha, s>}),
// so the tail beyond N is at most K(s) u^{N+1} / (1 - u) with u = z rho h(s) < 1. For
// symmetric walks p^n(0, x) <= rho_tilde^n gives a second bound.
//
// Critical z = 1 / rho_tilde: the terms decay like n^{-m}, m = |R^+| + r/2. The sum is
// truncated at a fixed N and completed by the heuristic tail t_N N / (m - 1).

#include "bwalk/radial.hpp"
#include "bwalk/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwalk {

enum class GreenRegime { subcritical, critical };

struct GreenOptions {
    SReal rel_tol = 1e-12L;
    int max_terms = 2000;
    int critical_terms = 400;
    int check_every = 4;
};

struct GreenResult {
    Weight lambda;
    SReal value = 0;       // partial sum plus tail estimate (critical) or partial sum (subcritical)
    SReal partial_sum = 0;
    int terms = 0;         // last n included
    SReal tail = 0;        // rigorous bound (subcritical) or heuristic estimate (critical)
    bool certified = false;
    bool converged = false;
};

struct GreenBatch {
    WalkSpec walk;
    SReal z = 0;
    GreenRegime regime = GreenRegime::subcritical;
    std::vector<GreenResult> results;
    std::string truncation_note;
};

namespace detail {

// Tail bound machinery for one target weight.
class TailBound {
public:
    TailBound(const WalkSpec& walk, const Weight& lambda, SReal z)
        : walk_(walk), lambda_(lambda), z_(z), hs_(walk), log_rho_z_(rho(walk).log() + std::log(z))
    {
        const int r = walk.p.r;
        log_q_ = std::log(static_cast<SReal>(walk.p.q));
        if (length(lambda) > 0) {
            const auto gs = green_saddle(lambda, z, walk);
            for (int i = 0; i <= 20; ++i) candidates_.push_back(gs.s0 * (static_cast<SReal>(i) / 20));
        } else {
            candidates_.push_back(SVec::Zero(r));
        }
        if (walk.is_symmetric()) log_rho_tilde_z_ = static_cast<SReal>(std::log(rho_tilde(walk).to_long_double())) + std::log(z);
    }

    // log of an upper bound for sum_{n > N} p^n(0, x) z^n; +inf if no candidate applies.
    SReal log_tail(int N) const
    {
        SReal best = std::numeric_limits<SReal>::infinity();
        auto consider = [&](const SVec& s) {
            const SReal lu = log_rho_z_ + hs_.log_h(s);
            if (!(lu < 0)) return;
            best = std::min(best, log_K(s) + (N + 1) * lu - std::log1p(-std::exp(lu)));
        };
        for (const auto& s : candidates_) consider(s);
        // large-deviation point for horizon N
        SVec d(walk_.p.r);
        for (int i = 0; i < walk_.p.r; ++i) d(i) = static_cast<SReal>(lambda_[i] + 1) / (N + 1 + walk_.p.r);
        if (d.sum() < 1) {
            SVec s = solve_saddle(d, walk_).s;
            consider(s);
        }
        if (log_rho_tilde_z_ && *log_rho_tilde_z_ < 0)
            best = std::min(best, (N + 1) * *log_rho_tilde_z_ - std::log1p(-std::exp(*log_rho_tilde_z_)));
        return best;
    }

private:
    SReal log_K(const SVec& x) const
    {
        const int r = walk_.p.r;
        const SVec c = chamber_coordinates(x);
        SReal out = -0.5L * translation_exponent(lambda_) * log_q_;
        for (int i = 0; i < r; ++i) out -= (lambda_[i] + 1) * x(i);
        for (const auto& al : positive_root_list(r)) {
            SReal a = 0;
            for (int i = al.a; i < al.b; ++i) a += c(i);
            if (a < -1e-12L) return std::numeric_limits<SReal>::infinity();
            out += std::log(2 * std::cosh(a / 2)) - std::log1p(-std::exp(-a - log_q_));
        }
        return out;
    }

    WalkSpec walk_;
    Weight lambda_;
    SReal z_;
    ExpSum hs_;
    SReal log_rho_z_ = 0;
    SReal log_q_ = 0;
    std::optional<SReal> log_rho_tilde_z_;
    std::vector<SVec> candidates_;
};

inline void check_targets(const WalkSpec& walk, const std::vector<Weight>& lambdas)
{
    if (lambdas.empty()) throw std::invalid_argument("green_exact: no target weights");
    for (const auto& l : lambdas)
        if (l.rank() != walk.p.r || !is_dominant(l)) throw std::invalid_argument("green_exact: targets must be dominant weights of the walk's rank");
}

inline GreenBatch green_subcritical(const WalkSpec& walk, const std::vector<Weight>& lambdas, SReal z, const GreenOptions& opt)
{
    GreenBatch out{walk, z, GreenRegime::subcritical, {}, ""};
    std::vector<TailBound> bounds;
    std::vector<BigInt> nl;
    for (const auto& l : lambdas) {
        bounds.emplace_back(walk, l, z);
        out.results.push_back(GreenResult{l});
        nl.push_back(N_lambda_value(l, walk.p));
    }
    std::vector<SReal> inv_n;
    for (const auto& v : nl) inv_n.push_back(1 / static_cast<SReal>(QuadraticScalar(walk.p.q, Rational(v)).to_long_double()));

    RadialChain<SReal> chain(walk);
    SReal zn = 1;
    std::size_t open = lambdas.size();
    for (int n = 0; n <= opt.max_terms && open > 0; ++n) {
        if (n > 0) {
            chain.step();
            zn *= z;
        }
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            auto& res = out.results[i];
            if (res.converged) continue;
            res.partial_sum += chain.radial_value(lambdas[i]) * inv_n[i] * zn;
            res.terms = n;
            if (n % opt.check_every != 0 || !(res.partial_sum > 0)) continue;
            const SReal lt = bounds[i].log_tail(n);
            if (lt <= std::log(opt.rel_tol * res.partial_sum)) {
                res.tail = std::exp(lt);
                res.converged = true;
                res.certified = true;
                --open;
            }
        }
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        auto& res = out.results[i];
        if (!res.converged) res.tail = std::exp(bounds[i].log_tail(res.terms));
        res.value = res.partial_sum;
    }
    out.truncation_note = open == 0 ? "certified tail bound below rel_tol at every target"
                                    : "max_terms reached before the tail bound met rel_tol at some targets";
    return out;
}

inline GreenBatch green_critical(const WalkSpec& walk, const std::vector<Weight>& lambdas, const GreenOptions& opt)
{
    const SReal z = 1 / static_cast<SReal>(rho_tilde(walk).to_long_double());
    GreenBatch out{walk, z, GreenRegime::critical, {}, ""};
    const int N = opt.critical_terms;
    if (N < 2) throw std::invalid_argument("green_exact: critical_terms must be >= 2");
    const SReal m = walk.p.num_positive_roots() + 0.5L * walk.p.r;
    std::vector<SReal> inv_n, last(lambdas.size(), 0), prev(lambdas.size(), 0);
    for (const auto& l : lambdas) {
        out.results.push_back(GreenResult{l});
        inv_n.push_back(1 / static_cast<SReal>(QuadraticScalar(walk.p.q, Rational(N_lambda_value(l, walk.p))).to_long_double()));
    }
    RadialChain<SReal> chain(walk, N);
    SReal zn = 1;
    for (int n = 0; n <= N; ++n) {
        if (n > 0) {
            chain.step();
            zn *= z;
        }
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const SReal t = chain.radial_value(lambdas[i]) * inv_n[i] * zn;
            out.results[i].partial_sum += t;
            prev[i] = last[i];
            last[i] = t;
        }
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        auto& res = out.results[i];
        res.terms = N;
        res.tail = 0.5L * (prev[i] + last[i]) * N / (m - 1);
        res.value = res.partial_sum + res.tail;
        res.converged = true;
    }
    out.truncation_note = "critical sum truncated at n = " + std::to_string(N) +
                          " with heuristic tail t_N N / (m - 1), m = |R^+| + r/2 = " + std::to_string(static_cast<double>(m));
    return out;
}

} // namespace detail

// z as a real number; |z rho_tilde - 1| <= 1e-15 is treated as critical.
inline GreenBatch green_exact(const WalkSpec& walk, const std::vector<Weight>& lambdas, SReal z, const GreenOptions& opt = {})
{
    detail::check_targets(walk, lambdas);
    const SReal zr = z * static_cast<SReal>(rho_tilde(walk).to_long_double());
    if (!(z > 0)) throw std::invalid_argument("green_exact: z must be positive");
    if (std::fabs(zr - 1) <= 1e-15L) return detail::green_critical(walk, lambdas, opt);
    if (zr > 1) throw std::invalid_argument("green_exact: z exceeds 1 / rho_tilde, the series diverges");
    return detail::green_subcritical(walk, lambdas, z, opt);
}

// z = fraction / rho_tilde with an exact fraction in (0, 1].
inline GreenBatch green_exact_fraction(const WalkSpec& walk, const std::vector<Weight>& lambdas, const Rational& fraction,
                                       const GreenOptions& opt = {})
{
    detail::check_targets(walk, lambdas);
    if (fraction <= 0 || fraction > 1) throw std::invalid_argument("green_exact: fraction of 1 / rho_tilde must lie in (0, 1]");
    if (fraction == 1) return detail::green_critical(walk, lambdas, opt);
    const SReal z = static_cast<SReal>(QuadraticScalar(walk.p.q, fraction).to_long_double()) /
                    static_cast<SReal>(rho_tilde(walk).to_long_double());
    return detail::green_subcritical(walk, lambdas, z, opt);
}

inline GreenResult green_exact(const WalkSpec& walk, const Weight& lambda, SReal z, const GreenOptions& opt = {})
{
    return green_exact(walk, std::vector<Weight>{lambda}, z, opt).results.front();
}

} // namespace bwalk
