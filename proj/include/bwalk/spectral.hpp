#pragma once

// Spectral objects on the complexified Cartan subspace: c, b, Delta, h, the Macdonald
// spherical polynomials P_lambda, the value F_0(lambda) = P_lambda(0), and a torus
// quadrature for p^n(0, x).
//
// Points z are ambient complex vectors (r+1 coordinates summing to zero);
// <e_a - e_b, z> = z_a - z_b and <lambda, z> = sum_j v_j z_j for the ambient representative v.

#include "bwalk/exact_kernel.hpp"
#include "bwalk/saddle.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bwalk {

using Real = long double;
using Complex = std::complex<Real>;
using CVec = std::vector<Complex>;
using RVec = std::vector<Real>;

struct SpectralPoint {
    CVec z;

    // z = i theta + s from real ambient vectors; both are projected onto the sum-zero hyperplane.
    static SpectralPoint from_parts(RVec theta, RVec s)
    {
        if (theta.size() != s.size()) throw std::invalid_argument("SpectralPoint: size mismatch");
        center(theta);
        center(s);
        SpectralPoint p;
        for (std::size_t j = 0; j < s.size(); ++j) p.z.emplace_back(s[j], theta[j]);
        return p;
    }

    // theta = 2 pi sum_i y_i alpha_i, s = sum_i x_i alpha_i (simple-root coordinates).
    static SpectralPoint from_root_coordinates(const RVec& y, const RVec& x)
    {
        const std::size_t r = y.size();
        if (x.size() != r) throw std::invalid_argument("SpectralPoint: size mismatch");
        SpectralPoint p;
        p.z.assign(r + 1, Complex(0));
        for (std::size_t i = 0; i < r; ++i) {
            const Complex c(x[i], 2 * std::numbers::pi_v<Real> * y[i]);
            p.z[i] += c;
            p.z[i + 1] -= c;
        }
        return p;
    }

    int rank() const { return static_cast<int>(z.size()) - 1; }

private:
    static void center(RVec& v)
    {
        Real m = 0;
        for (Real x : v) m += x;
        m /= static_cast<Real>(v.size());
        for (Real& x : v) x -= m;
    }
};

inline Complex root_pairing(const Root& al, const CVec& z)
{
    return z[static_cast<std::size_t>(al.a)] - z[static_cast<std::size_t>(al.b)];
}

inline Complex weight_pairing(const Weight& w, const CVec& z)
{
    const auto v = ambient(w);
    Complex s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += static_cast<Real>(v[j]) * z[j];
    return s;
}

inline CVec weyl_apply(const WeylElement& w, const CVec& z) { return w.apply_ambient(z); }

struct CBDelta {
    Complex c;
    Complex b;
    Complex delta;
    bool c_singular = false;
};

inline CBDelta c_b_delta(const SpectralPoint& pt, const RankParams& p, Real singular_tol = 1e-14L)
{
    if (pt.rank() != p.r) throw std::invalid_argument("c_b_delta: rank mismatch");
    const Real qinv = Real(1) / static_cast<Real>(p.q);
    CBDelta out{Complex(1), Complex(1), Complex(1), false};
    for (const auto& al : positive_root_list(p.r)) {
        const Complex a = root_pairing(al, pt.z);
        const Complex em = std::exp(-a);
        const Complex bden = Real(1) - qinv * em;
        if (std::abs(bden) < singular_tol) throw std::domain_error("c_b_delta: b-function pole");
        const Complex cden = Real(1) - em;
        if (std::abs(cden) < singular_tol) out.c_singular = true;
        else out.c *= bden / cden;
        out.b /= bden;
        out.delta *= std::exp(a / Real(2)) - std::exp(-a / Real(2));
    }
    if (out.c_singular) out.c = Complex(std::numeric_limits<Real>::infinity());
    return out;
}

inline Complex c_function(const CVec& z, const RankParams& p)
{
    const Real qinv = Real(1) / static_cast<Real>(p.q);
    Complex c(1);
    for (const auto& al : positive_root_list(p.r)) {
        const Complex em = std::exp(-root_pairing(al, z));
        c *= (Real(1) - qinv * em) / (Real(1) - em);
    }
    return c;
}

// h(z) for the walk (orbit weights included).
inline Complex h_value(const CVec& z, const WalkSpec& w)
{
    Complex s = 0;
    for (int k = 1; k <= w.p.r; ++k) {
        const Real wk = static_cast<Real>(w.orbit_weight(k).get_d());
        for (const auto& mu : weyl_orbit(w.p.r, k)) s += wk * std::exp(weight_pairing(mu, z));
    }
    return s;
}

inline Real poincare_value(const RankParams& p) { return poincare(Subgroup::full, p).evaluate(p.q).to_long_double(); }

// Symmetrized c-weighted exponential sum.
inline Complex macdonald_P(const Weight& lambda, const SpectralPoint& pt, const RankParams& p, Real regular_tol = 1e-9L)
{
    if (!is_dominant(lambda)) throw std::invalid_argument("macdonald_P: weight must be dominant");
    for (const auto& al : positive_root_list(p.r))
        if (std::abs(Real(1) - std::exp(-root_pairing(al, pt.z))) < regular_tol)
            throw std::domain_error("macdonald_P: point too close to a c-function pole; use F0 for z = 0");
    Complex s = 0;
    for (const auto& w : weyl_group(p.r)) {
        const CVec wz = weyl_apply(w, pt.z);
        s += c_function(wz, p) * std::exp(weight_pairing(lambda, wz));
    }
    const Real pref = QuadraticScalar::half_power(p.q, -translation_exponent(lambda)).to_long_double() / poincare_value(p);
    return pref * s;
}

// Orbit form for fundamental weights: q^{E_k/2} / N_k * sum_{mu in W_0 lambda_k} e^{<mu,z>}.
inline Complex macdonald_P_fundamental(int k, const SpectralPoint& pt, const RankParams& p)
{
    const Weight lk = Weight::fundamental(p.r, k);
    Complex s = 0;
    for (const auto& mu : weyl_orbit(p.r, k)) s += std::exp(weight_pairing(mu, pt.z));
    const Real pref = QuadraticScalar::half_power(p.q, translation_exponent(lk)).to_long_double() /
                      static_cast<Real>(N_lambda_value(lk, p).get_d());
    return pref * s;
}

// Exact evaluation of F_0 = P_lambda(0) through a univariate limit along z = t v,
// where v is dominant regular with <alpha_j, v> = (r+2)^{j-1}.
// For each w, c(w t v) e^{t <lambda, w v>} is rewritten over the common denominator
// prod_{alpha > 0} (1 - y^{-<alpha, v>}), y = e^t; the summed numerator sum_j c_j y^j has
// a zero of order N = |R^+| at y = 1 and the limit is sum_j c_j j^N / (N! prod <alpha, v>).
class F0Evaluator {
public:
    explicit F0Evaluator(const RankParams& p) : p_(p)
    {
        const int r = p.r;
        nroots_ = p.num_positive_roots();
        v_.assign(static_cast<std::size_t>(r + 1), 0);
        for (int j = r - 1; j >= 0; --j) {
            long step = 1;
            for (int i = 0; i < j; ++i) step *= (r + 2);
            v_[static_cast<std::size_t>(j)] = v_[static_cast<std::size_t>(j + 1)] + step;
        }
        const Rational qinv(1, p.q);
        BigInt denom_int = 1;
        for (int i = 2; i <= nroots_; ++i) denom_int *= i;
        for (const auto& al : positive_root_list(r))
            denom_int *= BigInt(v_[static_cast<std::size_t>(al.a)] - v_[static_cast<std::size_t>(al.b)]);
        const ScalarQ w0 = poincare(Subgroup::full, p);
        const QuadraticScalar w0v = w0.evaluate(p.q);
        if (w0v.sqrt_part() != 0) throw std::logic_error("F0Evaluator: W_0(q^{-1}) must be rational");
        scale_ = Rational(1) / (Rational(denom_int) * w0v.rational_part());

        for (const auto& w : weyl_group(r)) {
            const auto wv = w.apply_ambient(v_);
            int sign = 1;
            long shift = 0;
            std::map<long, Rational> poly{{0, Rational(1)}};
            for (const auto& al : positive_root_list(r)) {
                const long b = wv[static_cast<std::size_t>(al.a)] - wv[static_cast<std::size_t>(al.b)];
                if (b < 0) {
                    sign = -sign;
                    shift -= -b;
                }
                std::map<long, Rational> next;
                for (const auto& [e, c] : poly) {
                    next[e] += c;
                    next[e - b] -= c * qinv;
                }
                poly = std::move(next);
            }
            // moments M_i = sum_e c_e (e + shift)^i, i = 0..N
            Term t;
            t.wv = wv;
            t.moments.assign(static_cast<std::size_t>(nroots_ + 1), Rational(0));
            for (const auto& [e, c] : poly) {
                if (c == 0) continue;
                Rational pw = sign * c;
                const Rational x(e + shift);
                for (int i = 0; i <= nroots_; ++i) {
                    t.moments[static_cast<std::size_t>(i)] += pw;
                    pw *= x;
                }
            }
            terms_.push_back(std::move(t));
        }
        binom_.assign(static_cast<std::size_t>(nroots_ + 1), std::vector<BigInt>(static_cast<std::size_t>(nroots_ + 1), 0));
        for (int a = 0; a <= nroots_; ++a) {
            binom_[static_cast<std::size_t>(a)][0] = 1;
            for (int b = 1; b <= a; ++b)
                binom_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    binom_[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] +
                    (b < a ? binom_[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)] : BigInt(0));
        }
    }

    const RankParams& params() const { return p_; }
    const std::vector<long>& direction() const { return v_; }

    // q_{t_lambda}^{1/2} F_0(lambda), a rational number.
    Rational reduced(const Weight& lambda) const
    {
        if (!is_dominant(lambda)) throw std::invalid_argument("F0: weight must be dominant");
        const auto lv = ambient(lambda);
        // sum_w sum_e c (e + L_w)^m = sum_i C(m,i) L_w^{m-i} M_i
        std::vector<Rational> totals(static_cast<std::size_t>(nroots_ + 1), Rational(0));
        for (const auto& t : terms_) {
            long L = 0;
            for (std::size_t j = 0; j < lv.size(); ++j) L += lv[j] * t.wv[j];
            const Rational Lr(L);
            for (int m = 0; m <= nroots_; ++m) {
                Rational s = 0, lp = 1;
                for (int i = m; i >= 0; --i) {
                    s += Rational(binom_[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)]) * lp * t.moments[static_cast<std::size_t>(i)];
                    lp *= Lr;
                }
                totals[static_cast<std::size_t>(m)] += s;
            }
        }
        for (int m = 0; m < nroots_; ++m)
            if (totals[static_cast<std::size_t>(m)] != 0)
                throw std::logic_error("F0: pole cancellation failed at order " + std::to_string(m));
        return totals[static_cast<std::size_t>(nroots_)] * scale_;
    }

    QuadraticScalar exact(const Weight& lambda) const
    {
        return QuadraticScalar::half_power(p_.q, -translation_exponent(lambda)) * reduced(lambda);
    }

private:
    struct Term {
        std::vector<long> wv;
        std::vector<Rational> moments;
    };

    RankParams p_;
    int nroots_ = 1;
    std::vector<long> v_;
    Rational scale_;
    std::vector<Term> terms_;
    std::vector<std::vector<BigInt>> binom_;
};

inline QuadraticScalar F0(const Weight& lambda, const RankParams& p) { return F0Evaluator(p).exact(lambda); }

// q_{t_lambda}^{1/2} F_0(lambda) by Richardson extrapolation of P_lambda(t u) as t -> 0,
// evaluated in MPFR arithmetic. u is the unit-max-pairing regular direction.
inline Real F0_reduced_numeric(const Weight& lambda, const RankParams& p, unsigned bits = 128, int levels = 10)
{
    using mpfr_float = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;
    const int r = p.r;
    const int nroots = p.num_positive_roots();
    std::vector<long> v(static_cast<std::size_t>(r + 1), 0);
    for (int j = r - 1; j >= 0; --j) v[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j + 1)] + (j + 1) * (j + 2);
    const long vmax = v[0] - v[static_cast<std::size_t>(r)];
    long vmin = vmax;
    for (const auto& al : positive_root_list(r))
        vmin = std::min(vmin, v[static_cast<std::size_t>(al.a)] - v[static_cast<std::size_t>(al.b)]);

    const auto lv = ambient(lambda);
    long lmax = 1;
    for (long x : lv) lmax = std::max(lmax, std::labs(x) + 1);
    const double h = 0.5 / static_cast<double>(lmax * vmax);
    const double tmin = h / std::ldexp(1.0, levels);
    // cancellation loses about N * log2(1/(t * vmin)) bits
    const double lost = nroots * std::log2(1.0 / (tmin * static_cast<double>(vmin)));
    const unsigned work_bits = bits + static_cast<unsigned>(std::max(0.0, lost)) + 32;

    const unsigned old_digits = mpfr_float::default_precision();
    mpfr_float::default_precision(static_cast<unsigned>(work_bits * 0.30103) + 5);

    const mpfr_float qinv = mpfr_float(1) / mpfr_float(p.q);
    const auto weyl = weyl_group(r);
    auto evaluate = [&](const mpfr_float& t) {
        mpfr_float s = 0;
        for (const auto& w : weyl) {
            const auto wv = w.apply_ambient(v);
            mpfr_float c = 1;
            for (const auto& al : positive_root_list(r)) {
                const mpfr_float em = exp(-t * (wv[static_cast<std::size_t>(al.a)] - wv[static_cast<std::size_t>(al.b)]));
                c *= (1 - qinv * em) / (1 - em);
            }
            long L = 0;
            for (std::size_t j = 0; j < lv.size(); ++j) L += lv[j] * wv[j];
            s += c * exp(t * L);
        }
        return s;
    };

    std::vector<mpfr_float> ts, table;
    for (int j = 0; j <= levels; ++j) {
        ts.push_back(mpfr_float(h) / pow(mpfr_float(2), j));
        table.push_back(evaluate(ts.back()));
    }
    // Neville extrapolation to t = 0
    for (int k = 1; k <= levels; ++k)
        for (int j = levels; j >= k; --j)
            table[static_cast<std::size_t>(j)] = (ts[static_cast<std::size_t>(j - k)] * table[static_cast<std::size_t>(j)] -
                                                  ts[static_cast<std::size_t>(j)] * table[static_cast<std::size_t>(j - 1)]) /
                                                 (ts[static_cast<std::size_t>(j - k)] - ts[static_cast<std::size_t>(j)]);
    const mpfr_float w0_exact = [&]() -> mpfr_float {
        const QuadraticScalar x = poincare(Subgroup::full, p).evaluate(p.q);
        mpfr_float num(x.rational_part().get_num().get_str()), den(x.rational_part().get_den().get_str());
        return num / den;
    }();
    const Real out = table[static_cast<std::size_t>(levels)].convert_to<Real>() / w0_exact.convert_to<Real>();
    mpfr_float::default_precision(old_digits);
    return out;
}

enum class QuadratureForm { reduced, plancherel };

struct QuadratureResult {
    Real value = 0;
    int grid = 0;          // points per dimension
    Real normalization = 0; // calibrated n = 0, lambda = 0 integral
};

// Minimum points per dimension for aliasing below ~2^-60 relative. The k-th term
// q^{-k} e^{-k<alpha, z>} of each root factor has frequency up to 2k in root coordinates.
inline int quadrature_min_grid(const RankParams& p, int n, const Weight& lambda)
{
    int mmax = 0;
    for (int x : lambda.m) mmax = std::max(mmax, std::abs(x));
    const int alias = n + mmax + 2 * p.r + 2 * static_cast<int>(std::ceil(60.0 / std::log2(static_cast<double>(p.q))));
    return std::max({4 * n, alias, 8});
}

// Numeric inversion integral for p^n(0, x) over the torus a / 2 pi Q, trapezoid rule.
// reduced:     rho^n q^{-E/2} avg[ h^n e^{-<z, lambda + rho_P>} Delta b ] over z = i theta + s
// plancherel:  avg[ (rho h)^n conj(P_lambda) / |c|^2 ] on a half-shifted grid
// Both are normalized by the n = 0, lambda = 0 integral on the same grid. With shift set,
// the reduced form moves the contour to the saddle point s of (lambda + rho_P) / (n + r)
// (no pole of b lies in the closed chamber), which removes the cancellation that otherwise
// limits the relative accuracy of small values.
inline QuadratureResult quadrature_pn(const WalkSpec& walk, int n, const Weight& lambda, int grid = 0,
                                      QuadratureForm form = QuadratureForm::reduced, bool shift = true)
{
    const RankParams& p = walk.p;
    if (p.r > 2) throw std::invalid_argument("quadrature_pn: rank <= 2 only");
    if (!is_dominant(lambda) || lambda.rank() != p.r) throw std::invalid_argument("quadrature_pn: bad weight");
    const int need = quadrature_min_grid(p, n, lambda);
    if (grid == 0) grid = need;
    if (grid < need) throw std::invalid_argument("quadrature_pn: grid " + std::to_string(grid) + " below required " + std::to_string(need));

    const Real rho_v = rho(walk).to_long_double();
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    const Real qinv = Real(1) / static_cast<Real>(p.q);
    const Real offset = (form == QuadratureForm::plancherel) ? Real(0.5) : Real(0);
    const Weight zero = Weight::zero(p.r);

    // with theta = 2 pi sum y_i alpha_i, <mu, theta> = 2 pi m . y for any weight mu
    std::vector<std::pair<Weight, Real>> hterms;
    for (int k = 1; k <= p.r; ++k)
        for (const auto& mu : weyl_orbit(p.r, k)) hterms.emplace_back(mu, static_cast<Real>(walk.orbit_weight(k).get_d()));
    std::vector<Weight> roots;
    for (const auto& al : positive_root_list(p.r)) roots.push_back(root_weight(al, p.r));
    const Weight target = lambda + rho_P(p.r);
    const Weight zero_target = rho_P(p.r);
    auto dot = [&](const Weight& m, const RVec& y) {
        Real s = 0;
        for (int i = 0; i < p.r; ++i) s += static_cast<Real>(m[i]) * y[static_cast<std::size_t>(i)];
        return two_pi * s;
    };

    // real shift in simple-root coordinates
    RVec sx(static_cast<std::size_t>(p.r), Real(0));
    if (form == QuadratureForm::reduced && shift) {
        SVec d(p.r);
        for (int i = 0; i < p.r; ++i) d(i) = static_cast<Real>(target[i]) / static_cast<Real>(n + p.r);
        if (d.sum() < 1) {
            const SVec s0 = solve_saddle(d, walk).s;
            for (int i = 0; i < p.r; ++i) sx[static_cast<std::size_t>(i)] = s0(i);
        }
    }
    auto real_pair = [&](const Weight& m) {
        Real s = 0;
        for (int i = 0; i < p.r; ++i) s += static_cast<Real>(m[i]) * sx[static_cast<std::size_t>(i)];
        return s;
    };
    Real log_hs = 0; // log h(s), factored out of h^n
    {
        Real hs = 0;
        for (const auto& [mu, c] : hterms) hs += c * std::exp(real_pair(mu));
        log_hs = std::log(hs);
    }

    Complex acc = 0, acc0 = 0;
    long total = 1;
    for (int i = 0; i < p.r; ++i) total *= grid;
    RVec y(static_cast<std::size_t>(p.r));
    const RVec x(static_cast<std::size_t>(p.r), Real(0));
    for (long t = 0; t < total; ++t) {
        long rem = t;
        for (int i = 0; i < p.r; ++i) {
            y[static_cast<std::size_t>(i)] = (static_cast<Real>(rem % grid) + offset) / static_cast<Real>(grid);
            rem /= grid;
        }
        if (form == QuadratureForm::reduced) {
            Complex hv = 0;
            for (const auto& [mu, c] : hterms) hv += c * std::exp(Complex(real_pair(mu) - log_hs, dot(mu, y)));
            Complex base = 1, base0 = 1;
            for (const auto& a : roots) {
                const Real ang = dot(a, y);
                const Complex za(real_pair(a), ang);
                base *= Real(2) * std::sinh(za / Real(2)) / (Real(1) - qinv * std::exp(-za));
                base0 *= Complex(0, 2 * std::sin(ang / 2)) / (Real(1) - qinv * std::polar(Real(1), -ang));
            }
            acc += std::pow(hv, n) * std::polar(Real(1), -dot(target, y)) * base;
            acc0 += std::polar(Real(1), -dot(zero_target, y)) * base0;
        } else {
            Complex hv = 0;
            for (const auto& [mu, c] : hterms) hv += c * std::polar(Real(1), dot(mu, y));
            const SpectralPoint pt = SpectralPoint::from_root_coordinates(y, x);
            const Complex cinv = Real(1) / c_function(pt.z, p);
            const Real dens = std::norm(cinv);
            acc += std::pow(rho_v * hv, n) * std::conj(macdonald_P(lambda, pt, p, 0)) * dens;
            acc0 += std::conj(macdonald_P(zero, pt, p, 0)) * dens;
        }
    }
    QuadratureResult out;
    out.grid = grid;
    out.normalization = acc0.real() / static_cast<Real>(total);
    Real value = acc.real() / acc0.real();
    if (form == QuadratureForm::reduced)
        value *= std::pow(rho_v, n) * QuadraticScalar::half_power(p.q, -translation_exponent(lambda)).to_long_double() *
                 std::exp(n * log_hs - real_pair(target));
    out.value = value;
    return out;
}

} // namespace bwalk
