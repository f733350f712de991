#pragma once

// Exact polynomial identities in the weight-lattice group ring:
//   (a) h + 2 = prod_{i=1}^{r+1} (1 + e^{lambda_i - lambda_{i-1}}),  lambda_0 = lambda_{r+1} = 0
//   (b) rank 2: pi(d)[h^{n+3}] = (n+3)(n+2)(n+1) [((n+3)/(n+1)) h + 2] h^n Delta
//   (c) pi(d)[h^{n+N}] (N = |R^+|) is skew, divisible by Delta, and the quotient equals
//       (n+N)...(n+1) r_n(h) h^n with r_n = sum_{k=r}^{N} c_k (h+2)^{k-r} h^{N-k} / ((n+1)...(n+N-k))
//       for constants c_k independent of n.

#include "bwalk/laurent.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace bwalk {

struct IdentityCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct IdentityReport {
    RankParams params;
    std::vector<IdentityCheck> checks;

    bool all_passed() const
    {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
};

// Describes the first weight where a and b differ, or returns an empty string.
template <class Coeff>
std::string first_difference(const LaurentPoly<Coeff>& a, const LaurentPoly<Coeff>& b)
{
    std::map<Weight, bool> keys;
    for (const auto& [mu, c] : a.terms()) keys[mu] = true;
    for (const auto& [mu, c] : b.terms()) keys[mu] = true;
    for (const auto& [mu, unused] : keys) {
        const Coeff x = a.coeff(mu), y = b.coeff(mu);
        if (x != y) {
            std::ostringstream os;
            os << "weight " << mu << ": lhs " << x << " vs rhs " << y;
            return os.str();
        }
    }
    return {};
}

inline IdentityCheck check_h_plus_two_product(const RankParams& p)
{
    const int r = p.r;
    auto rhs = RationalLaurent::constant(r, Rational(1));
    for (int i = 1; i <= r + 1; ++i) {
        Weight mu = Weight::zero(r);
        if (i <= r) mu[i - 1] += 1;
        if (i - 1 >= 1) mu[i - 2] -= 1;
        RationalLaurent factor = RationalLaurent::constant(r, Rational(1));
        factor.add_term(mu, Rational(1));
        rhs = rhs * factor;
    }
    RationalLaurent lhs = h_poly(p) + RationalLaurent::constant(r, Rational(2));
    IdentityCheck c{"h+2 product (r=" + std::to_string(r) + ")", lhs == rhs, ""};
    if (!c.passed) c.detail = first_difference(lhs, rhs);
    return c;
}

inline IdentityCheck check_weyl_denominator_forms(const RankParams& p)
{
    const auto alt = doubled(weyl_denominator(p));
    const auto prod = weyl_denominator_product_doubled(p);
    IdentityCheck c{"Weyl denominator alternating = product (r=" + std::to_string(p.r) + ")", alt == prod, ""};
    if (!c.passed) c.detail = first_difference(alt, prod);
    return c;
}

inline IdentityCheck check_rank2_orbit_identity(int n, const RationalLaurent& h)
{
    if (h.rank() != 2) throw std::invalid_argument("rank-2 orbit identity requires r = 2");
    const RationalLaurent hn = pow(h, n);
    const RationalLaurent lhs = pi_derivative(hn * h * h * h);
    RationalLaurent inner = h * make_rational(n + 3, n + 1);
    inner += RationalLaurent::constant(2, Rational(2));
    RationalLaurent rhs = inner * hn * weyl_denominator(RankParams(2, 2));
    rhs *= Rational((n + 3) * (n + 2) * (n + 1));
    IdentityCheck c{"rank-2 pi(d) h^(n+3) formula, n=" + std::to_string(n), lhs == rhs, ""};
    if (!c.passed) c.detail = first_difference(lhs, rhs);
    return c;
}

namespace detail {

// Solves A x = b exactly for square nonsingular A (Gaussian elimination).
inline std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> A, std::vector<Rational> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || A[row][col] == 0) continue;
            const Rational f = A[row][col] / A[col][col];
            for (std::size_t k = col; k < n; ++k) A[row][k] -= f * A[col][k];
            b[row] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= A[i][i];
    return b;
}

} // namespace detail

struct GeneralIdentityData {
    bool skew = false;
    bool divisible = false;
    bool polynomial_in_h = false;
    std::vector<Rational> c; // c_r, ..., c_N when polynomial_in_h
};

// Structural check of the general-rank pi(d) h^{n+N} formula for one n.
inline GeneralIdentityData general_identity_data(const RankParams& p, int n)
{
    const int r = p.r, N = p.num_positive_roots(), m = N - r;
    const RationalLaurent h = h_poly(p);
    std::vector<RationalLaurent> hp{pow(h, n)};
    for (int j = 1; j <= N; ++j) hp.push_back(hp.back() * h);

    GeneralIdentityData res;
    const RationalLaurent lhs = pi_derivative(hp[static_cast<std::size_t>(N)]);
    res.skew = is_skew_invariant(lhs);
    auto q = divide_by_delta(lhs);
    res.divisible = q.has_value();
    if (!q) return res;

    BigInt falling = 1;
    for (int i = 1; i <= N; ++i) falling *= (n + i);
    RationalLaurent t = *q * Rational(BigInt(1), falling);

    // t = sum_j a_j h^{n+j}; the coefficient of k*lambda_1 is triangular in j.
    std::vector<Rational> a(static_cast<std::size_t>(m + 1), Rational(0));
    for (int j = m; j >= 0; --j) {
        const Weight top = (n + j) * Weight::fundamental(r, 1);
        Rational rest = t.coeff(top);
        for (int jj = j + 1; jj <= m; ++jj) rest -= a[static_cast<std::size_t>(jj)] * hp[static_cast<std::size_t>(jj)].coeff(top);
        a[static_cast<std::size_t>(j)] = rest / hp[static_cast<std::size_t>(j)].coeff(top);
    }
    RationalLaurent fit(r);
    for (int j = 0; j <= m; ++j) fit += hp[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)];
    res.polynomial_in_h = (fit == t);
    if (!res.polynomial_in_h) return res;

    // Express sum_j a_j h^j in the basis (h+2)^{k-r} h^{N-k} / ((n+1)...(n+N-k)).
    std::vector<std::vector<Rational>> A(static_cast<std::size_t>(m + 1), std::vector<Rational>(static_cast<std::size_t>(m + 1), Rational(0)));
    for (int k = r; k <= N; ++k) {
        const int e = k - r;
        Rational denom = 1;
        for (int i = 1; i <= N - k; ++i) denom *= (n + i);
        // (h+2)^e h^{N-k} = sum_i C(e,i) 2^{e-i} h^{i+N-k}; N-k+i ranges over 0..m
        BigInt binom = 1;
        for (int i = 0; i <= e; ++i) {
            if (i > 0) binom = binom * (e - i + 1) / i;
            const int deg = i + N - k;
            A[static_cast<std::size_t>(deg)][static_cast<std::size_t>(k - r)] += Rational(binom * bigint_pow(2, static_cast<unsigned long>(e - i))) / denom;
        }
    }
    auto c = detail::solve_exact(A, a);
    if (c) res.c = *c;
    return res;
}

// n_max bounds the rank-2 formula; the general-rank structure is checked for n <= general_n_max.
inline IdentityReport identity_suite(const RankParams& p, int n_max, int general_n_max = 2)
{
    if (n_max < 0) throw std::invalid_argument("identity_suite: n_max must be >= 0");
    IdentityReport rep{p, {}};
    rep.checks.push_back(check_h_plus_two_product(p));
    if (p.r <= 3) rep.checks.push_back(check_weyl_denominator_forms(p));
    if (p.r == 2) {
        const RationalLaurent h = h_poly(p);
        for (int n = 0; n <= n_max; ++n) rep.checks.push_back(check_rank2_orbit_identity(n, h));
    }
    if (p.r == 3) {
        std::optional<std::vector<Rational>> reference;
        for (int n = 0; n <= std::min(general_n_max, n_max); ++n) {
            const auto d = general_identity_data(p, n);
            const std::string tag = ", n=" + std::to_string(n);
            rep.checks.push_back({"pi(d) h^(n+6) skew-invariant" + tag, d.skew, ""});
            rep.checks.push_back({"pi(d) h^(n+6) divisible by Delta" + tag, d.divisible, ""});
            IdentityCheck fit{"quotient is (n+6)..(n+1) r_n(h) h^n" + tag, d.polynomial_in_h && !d.c.empty(), ""};
            if (fit.passed) {
                std::ostringstream os;
                os << "c_k =";
                for (const auto& x : d.c) os << " " << x;
                fit.detail = os.str();
                if (!reference) {
                    reference = d.c;
                } else if (*reference != d.c) {
                    fit.passed = false;
                    fit.detail += " (differs from n=0)";
                }
            }
            rep.checks.push_back(fit);
        }
    }
    return rep;
}

} // namespace bwalk
