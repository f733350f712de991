#pragma once

// Right-hand sides ("shapes") of the two-sided heat kernel and Green function bounds.
// All shapes are returned with their natural logarithm, since the raw values under-
// or overflow quickly.

#include "bwalk/saddle.hpp"
#include "bwalk/spectral.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace bwalk {

enum class Regime { interior, boundary, tree, green, green_critical };

inline std::string regime_name(Regime r)
{
    switch (r) {
    case Regime::interior: return "interior";
    case Regime::boundary: return "boundary";
    case Regime::tree: return "tree";
    case Regime::green: return "green";
    case Regime::green_critical: return "green_critical";
    }
    return "unknown";
}

struct EstimateValue {
    SReal log_value = 0;
    Regime regime = Regime::interior;
    int n = 0;
    Weight lambda;
    std::optional<SReal> z;
    bool corner_form = false; // boundary regime: the n - x1 v x2 <= K' form was used

    SReal value() const { return std::exp(log_value); }
};

class Estimates {
public:
    explicit Estimates(const WalkSpec& walk) : walk_(walk), f0_(walk.p)
    {
        log_rho_ = rho(walk).log();
        log_q_ = std::log(static_cast<SReal>(walk.p.q));
    }

    const WalkSpec& walk() const { return walk_; }

    SReal log_F0(const Weight& lambda) const
    {
        return -0.5L * static_cast<SReal>(translation_exponent(lambda)) * log_q_ + log_rational(f0_.reduced(lambda));
    }

    // delta = (lambda + rho_P) / (n + r) in fundamental coordinates.
    SVec heat_delta(int n, const Weight& lambda) const
    {
        const int r = walk_.p.r;
        SVec d(r);
        for (int i = 0; i < r; ++i) d(i) = static_cast<SReal>(lambda[i] + 1) / static_cast<SReal>(n + r);
        return d;
    }

    // n^{-|R^+|} rho^n e^{n phi(delta)} F_0(lambda) / sqrt(n^r prod_{alpha > 0} (1 - <alpha, delta>)).
    EstimateValue heat(int n, const Weight& lambda) const
    {
        check_weight(lambda);
        if (length(lambda) > n - 1) throw std::invalid_argument("heat_shape: need |lambda| <= n - 1");
        const int r = walk_.p.r;
        const SVec d = heat_delta(n, lambda);
        SReal log_prod = 0;
        for (const auto& al : positive_root_list(r)) {
            SReal pair = 0;
            for (int i = al.a; i < al.b; ++i) pair += d(i);
            if (!(1 - pair > 0)) throw std::invalid_argument("heat_shape: 1 - <alpha, delta> must be positive");
            log_prod += std::log(1 - pair);
        }
        const SReal ph = solve_saddle(d, walk_).phi;
        const SReal ln = std::log(static_cast<SReal>(n));
        EstimateValue e;
        e.regime = Regime::interior;
        e.n = n;
        e.lambda = lambda;
        e.log_value = -walk_.p.num_positive_roots() * ln + n * log_rho_ + n * ph + log_F0(lambda) -
                      0.5L * (r * ln + log_prod);
        return e;
    }

    // Rank 2, d = n - |lambda|: n^d (rho/q)^n C(n-d, x1 v x2 - d); when n - x1 v x2 <= k_prime
    // the form (rho/q)^n n^{(n - x1 v x2) + d} is used instead.
    EstimateValue boundary_rank2(int n, const Weight& lambda, int k_prime = 2) const
    {
        if (walk_.p.r != 2) throw std::invalid_argument("boundary shape requires rank 2");
        check_weight(lambda);
        const int d = n - length(lambda);
        const int xm = std::max(lambda[0], lambda[1]);
        if (d < 0) throw std::invalid_argument("boundary shape: |lambda| > n");
        if (xm - d < 0) throw std::invalid_argument("boundary shape: x1 v x2 < d is outside the binomial range");
        const SReal ln = std::log(static_cast<SReal>(n));
        EstimateValue e;
        e.regime = Regime::boundary;
        e.n = n;
        e.lambda = lambda;
        e.log_value = n * (log_rho_ - log_q_);
        if (n - xm <= k_prime) {
            e.corner_form = true;
            e.log_value += static_cast<SReal>((n - xm) + d) * ln;
        } else {
            BigInt c;
            mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n - d), static_cast<unsigned long>(xm - d));
            e.log_value += d * ln + log_rational(Rational(c));
        }
        return e;
    }

    // |lambda|^{-(|R^+| + (r-1)/2)} e^{-<lambda, s_0>} F_0(lambda).
    EstimateValue green(const Weight& lambda, SReal z) const
    {
        check_weight(lambda);
        if (length(lambda) == 0) throw std::invalid_argument("green shape: lambda = 0 excluded");
        const auto gs = green_saddle(lambda, z, walk_);
        SReal ls = 0;
        for (int i = 0; i < walk_.p.r; ++i) ls += lambda[i] * gs.s0(i);
        const SReal expo = walk_.p.num_positive_roots() + 0.5L * (walk_.p.r - 1);
        EstimateValue e;
        e.regime = Regime::green;
        e.lambda = lambda;
        e.z = z;
        e.log_value = -expo * std::log(static_cast<SReal>(length(lambda))) - ls + log_F0(lambda);
        return e;
    }

    // |lambda|^{-(2|R^+| + r - 2)} F_0(lambda).
    EstimateValue green_critical(const Weight& lambda) const
    {
        check_weight(lambda);
        if (length(lambda) == 0) throw std::invalid_argument("green shape: lambda = 0 excluded");
        const SReal expo = 2 * walk_.p.num_positive_roots() + walk_.p.r - 2;
        EstimateValue e;
        e.regime = Regime::green_critical;
        e.lambda = lambda;
        e.z = 1 / static_cast<SReal>(rho_tilde(walk_).to_long_double());
        e.log_value = -expo * std::log(static_cast<SReal>(length(lambda))) + log_F0(lambda);
        return e;
    }

    // Tree diagnostic |x| / (n sqrt(n - |x|)) rho^n e^{n phi} q^{-|x|/2}, 0 < |x| < n.
    // phi is the minimum of log h - <delta, u> at delta = (k+1)/(n+1) by default; with
    // alternate_phi the closed form ((1+d)log(1+d) + (1-d)log(1-d))/2, d = k/n, is used.
    // The closed form vanishes at d = 0 while the minimum equals log 2 there, so the two
    // differ by a factor growing like 2^n; the alternate form is diagnostic only.
    EstimateValue tree_shape(int n, int k, bool alternate_phi = false) const
    {
        if (walk_.p.r != 1) throw std::invalid_argument("tree shape requires rank 1");
        if (k <= 0 || k >= n) throw std::invalid_argument("tree shape: need 0 < k < n");
        SReal ph;
        if (alternate_phi) {
            const SReal d = static_cast<SReal>(k) / n;
            ph = 0.5L * ((1 + d) * std::log(1 + d) + (1 - d) * std::log(1 - d));
        } else {
            SVec d(1);
            d(0) = static_cast<SReal>(k + 1) / (n + 1);
            ph = solve_saddle(d, walk_).phi;
        }
        EstimateValue e;
        e.regime = Regime::tree;
        e.n = n;
        e.lambda = Weight{k};
        e.log_value = std::log(static_cast<SReal>(k)) - std::log(static_cast<SReal>(n)) -
                      0.5L * std::log(static_cast<SReal>(n - k)) + n * log_rho_ + n * ph - 0.5L * k * log_q_;
        return e;
    }

private:
    void check_weight(const Weight& lambda) const
    {
        if (lambda.rank() != walk_.p.r || !is_dominant(lambda)) throw std::invalid_argument("estimate: need a dominant weight of the walk's rank");
    }

    WalkSpec walk_;
    F0Evaluator f0_;
    SReal log_rho_ = 0;
    SReal log_q_ = 0;
};

inline EstimateValue heat_shape(int n, const Weight& lambda, const WalkSpec& w) { return Estimates(w).heat(n, lambda); }
inline EstimateValue boundary_shape_rank2(int n, const Weight& lambda, long q, int k_prime = 2)
{
    return Estimates(WalkSpec::simple(RankParams(2, q))).boundary_rank2(n, lambda, k_prime);
}
inline EstimateValue green_shape(const Weight& lambda, SReal z, const WalkSpec& w) { return Estimates(w).green(lambda, z); }
inline EstimateValue green_shape_critical(const Weight& lambda, const WalkSpec& w) { return Estimates(w).green_critical(lambda); }

} // namespace bwalk
