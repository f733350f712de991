#pragma once

// Exact n-step transition probabilities p^n(0, x) of nearest-neighbour walks on an
// affine building of type A~_r, indexed by the radial part lambda of x.
//
// p^n(0,x) = rho^n q^{-E(lambda)/2} sum_w det(w) G(lambda + rho_P - w rho_P),
// G(nu)   = sum_{kappa : R^+ -> N} q^{-|kappa|} [e^{nu + sum kappa_a a}] h^n.
//
// G is evaluated by one backward sweep per positive root a, g(nu) = f(nu) + g(nu + a)/q,
// over the region {0 <= c~_j <= U_j} of scaled root coordinates. Values are carried
// as integers scaled by q^{D(nu)}, D(nu) = (S_max - S(nu)) / (r+1), S = sum_j c~_j.

#include "bwalk/root_system.hpp"
#include "bwalk/scalar.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwalk {

class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Variant { simple, isotropic2 };

struct WalkSpec {
    RankParams p;
    Variant variant = Variant::simple;
    Rational p1 = 0; // per-vertex probabilities (isotropic2 only)
    Rational p2 = 0;

    static WalkSpec simple(const RankParams& params) { return WalkSpec{params, Variant::simple, 0, 0}; }

    static WalkSpec isotropic(const RankParams& params, const Rational& prob1, const Rational& prob2)
    {
        if (params.r != 2) throw std::invalid_argument("isotropic variant requires rank 2");
        if (prob1 <= 0 || prob2 <= 0) throw std::invalid_argument("isotropic probabilities must be positive");
        const BigInt n1 = N_lambda_value(Weight::fundamental(2, 1), params);
        const BigInt n2 = N_lambda_value(Weight::fundamental(2, 2), params);
        if (prob1 * Rational(n1) + prob2 * Rational(n2) != 1)
            throw std::invalid_argument("isotropic probabilities must satisfy p1*N1 + p2*N2 = 1");
        return WalkSpec{params, Variant::isotropic2, prob1, prob2};
    }

    // Coefficient of the orbit W_0 lambda_k in h.
    Rational orbit_weight(int k) const
    {
        if (variant == Variant::simple) return 1;
        // p_k = q^{-1} rho_simple w_k with rho_simple = q / (2N) gives w_k = 2 N p_k
        const Rational n1(N_lambda_value(Weight::fundamental(2, 1), p));
        return 2 * n1 * (k == 1 ? p1 : p2);
    }

    bool is_symmetric() const { return variant == Variant::simple || p1 == p2; }
};

// rho = 1 / sum_k q_{t_{lambda_k}}^{-1/2} N_{lambda_k}; the isotropic variant keeps the simple value.
inline QuadraticScalar rho(const WalkSpec& w)
{
    QuadraticScalar s(w.p.q);
    for (int k = 1; k <= w.p.r; ++k) {
        const Weight lk = Weight::fundamental(w.p.r, k);
        s += QuadraticScalar::half_power(w.p.q, -translation_exponent(lk)) * Rational(N_lambda_value(lk, w.p));
    }
    return s.inverse();
}

inline Rational h_at_zero(const WalkSpec& w)
{
    Rational s = 0;
    for (int k = 1; k <= w.p.r; ++k) s += w.orbit_weight(k) * Rational(static_cast<long>(weyl_orbit(w.p.r, k).size()));
    return s;
}

inline QuadraticScalar rho_tilde(const WalkSpec& w) { return rho(w) * h_at_zero(w); }

// One-step probability to each vertex of V_{lambda_k}(x).
inline QuadraticScalar step_probability(const WalkSpec& w, int k)
{
    if (w.variant == Variant::isotropic2) return QuadraticScalar(w.p.q, k == 1 ? w.p1 : w.p2);
    return QuadraticScalar::half_power(w.p.q, -translation_exponent(Weight::fundamental(w.p.r, k))) * rho(w);
}

struct KernelLimits {
    int max_n_r1 = 200;
    int max_n_r2 = 48;
    int max_n_r3 = 16;
    int max_n_other = 8;

    int ceiling(int r) const
    {
        switch (r) {
        case 1: return max_n_r1;
        case 2: return max_n_r2;
        case 3: return max_n_r3;
        default: return max_n_other;
        }
    }
};

struct KernelTable {
    WalkSpec walk;
    int n = 0;
    std::map<Weight, QuadraticScalar> entries; // all dominant weights of length <= n
    std::map<Weight, bool> reachable;          // coefficient of h^n at lambda is nonzero

    QuadraticScalar value(const Weight& lambda) const
    {
        if (!is_dominant(lambda)) throw std::invalid_argument("KernelTable: weight must be dominant");
        auto it = entries.find(lambda);
        return it == entries.end() ? QuadraticScalar(walk.p.q) : it->second;
    }
};

namespace detail {

// Dense array over an integer box in fundamental coordinates.
template <class T>
class BoxArray {
public:
    BoxArray() = default;
    BoxArray(std::vector<int> lo, std::vector<int> hi) : lo_(std::move(lo)), hi_(std::move(hi))
    {
        std::size_t total = 1;
        stride_.resize(lo_.size());
        for (std::size_t i = lo_.size(); i-- > 0;) {
            stride_[i] = total;
            total *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
        }
        data_.assign(total, T());
    }

    bool contains(const Weight& w) const
    {
        for (std::size_t i = 0; i < lo_.size(); ++i)
            if (w.m[i] < lo_[i] || w.m[i] > hi_[i]) return false;
        return true;
    }
    std::size_t index(const Weight& w) const
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < lo_.size(); ++i) idx += static_cast<std::size_t>(w.m[i] - lo_[i]) * stride_[i];
        return idx;
    }
    Weight point(std::size_t idx) const
    {
        Weight w = Weight::zero(static_cast<int>(lo_.size()));
        for (std::size_t i = 0; i < lo_.size(); ++i) {
            w.m[i] = lo_[i] + static_cast<int>(idx / stride_[i]);
            idx %= stride_[i];
        }
        return w;
    }
    std::size_t size() const { return data_.size(); }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    T* find(const Weight& w) { return contains(w) ? &data_[index(w)] : nullptr; }
    const T* find(const Weight& w) const { return contains(w) ? &data_[index(w)] : nullptr; }

private:
    std::vector<int> lo_, hi_;
    std::vector<std::size_t> stride_;
    std::vector<T> data_;
};

inline long common_denominator(const std::vector<Rational>& xs)
{
    BigInt d = 1;
    for (const auto& x : xs) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
    if (!d.fits_slong_p()) throw std::invalid_argument("walk weights have too large a denominator");
    return d.get_si();
}

} // namespace detail

// Integer-scaled h: H = D * h with integer orbit multiplicities.
struct ScaledSteps {
    std::vector<Weight> steps;
    std::vector<BigInt> mult;
    long scale = 1;
};

inline ScaledSteps scaled_steps(const WalkSpec& w)
{
    std::vector<Rational> weights;
    for (int k = 1; k <= w.p.r; ++k) weights.push_back(w.orbit_weight(k));
    ScaledSteps s;
    s.scale = detail::common_denominator(weights);
    for (int k = 1; k <= w.p.r; ++k) {
        const Rational mk = weights[static_cast<std::size_t>(k - 1)] * s.scale;
        for (const auto& mu : weyl_orbit(w.p.r, k)) {
            s.steps.push_back(mu);
            s.mult.push_back(mk.get_num());
        }
    }
    return s;
}

// Dense coefficients of H^n on the box [-n, n]^r.
inline detail::BoxArray<BigInt> h_power_dense(const ScaledSteps& st, int r, int n)
{
    std::vector<int> lo(static_cast<std::size_t>(r), -n), hi(static_cast<std::size_t>(r), n);
    detail::BoxArray<BigInt> cur(lo, hi);
    cur[cur.index(Weight::zero(r))] = 1;
    for (int step = 0; step < n; ++step) {
        detail::BoxArray<BigInt> next(lo, hi);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] == 0) continue;
            const Weight x = cur.point(i);
            for (std::size_t s = 0; s < st.steps.size(); ++s) {
                BigInt* t = next.find(x + st.steps[s]);
                if (t) *t += cur[i] * st.mult[s];
            }
        }
        cur = std::move(next);
    }
    return cur;
}

inline KernelTable kernel_table(const WalkSpec& w, int n, const KernelLimits& limits = {})
{
    const int r = w.p.r;
    const long q = w.p.q;
    if (n < 0) throw std::invalid_argument("kernel_table: n must be >= 0");
    if (n > limits.ceiling(r))
        throw ResourceLimitError("exact kernel: n = " + std::to_string(n) + " exceeds the ceiling " +
                                 std::to_string(limits.ceiling(r)) + " for rank " + std::to_string(r));

    const ScaledSteps st = scaled_steps(w);
    const auto hn = h_power_dense(st, r, n);

    // region bounds in scaled root coordinates
    std::vector<long> U(static_cast<std::size_t>(r), 0);
    for (const auto& s : st.steps) {
        const auto c = scaled_root_coordinates(s);
        for (int j = 0; j < r; ++j) U[static_cast<std::size_t>(j)] = std::max(U[static_cast<std::size_t>(j)], static_cast<long>(n) * c[static_cast<std::size_t>(j)]);
    }
    const long rp1 = r + 1;
    std::vector<int> lo(static_cast<std::size_t>(r)), hi(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        const long left = (i > 0) ? U[static_cast<std::size_t>(i - 1)] : 0;
        const long right = (i + 1 < r) ? U[static_cast<std::size_t>(i + 1)] : 0;
        lo[static_cast<std::size_t>(i)] = static_cast<int>(-((left + right) / rp1));
        hi[static_cast<std::size_t>(i)] = static_cast<int>(2 * U[static_cast<std::size_t>(i)] / rp1);
    }
    const long s_max = std::accumulate(U.begin(), U.end(), 0L);

    detail::BoxArray<BigInt> g(lo, hi);
    detail::BoxArray<char> in_region(lo, hi);
    detail::BoxArray<long> depth(lo, hi);
    std::vector<std::pair<long, std::size_t>> order;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Weight nu = g.point(i);
        const auto c = scaled_root_coordinates(nu);
        bool ok = true;
        long s = 0;
        for (int j = 0; j < r && ok; ++j) {
            ok = c[static_cast<std::size_t>(j)] >= 0 && c[static_cast<std::size_t>(j)] <= U[static_cast<std::size_t>(j)];
            s += c[static_cast<std::size_t>(j)];
        }
        if (!ok) continue;
        in_region[i] = 1;
        depth[i] = (s_max - s) / rp1;
        if (const BigInt* v = hn.find(nu); v && *v != 0) {
            mpz_ui_pow_ui(g[i].get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(depth[i]));
            g[i] *= *v;
        }
        order.emplace_back(s, i);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    for (const auto& al : positive_root_list(r)) {
        const Weight a = root_weight(al, r);
        const BigInt factor = bigint_pow(q, static_cast<unsigned long>(al.height() - 1));
        for (const auto& [s, i] : order) {
            const Weight up = g.point(i) + a;
            if (!in_region.contains(up)) continue;
            const std::size_t j = in_region.index(up);
            if (!in_region[j] || g[j] == 0) continue;
            g[i] += factor * g[j];
        }
    }

    const long d_max = s_max / rp1;
    const QuadraticScalar rho_n = rho(w).pow(n);
    const Rational common = Rational(1) / (Rational(bigint_pow(q, static_cast<unsigned long>(d_max))) *
                                           Rational(bigint_pow(st.scale, static_cast<unsigned long>(n))));
    const auto weyl = weyl_group(r);
    std::vector<std::pair<int, Weight>> shifts;
    const Weight rp = rho_P(r);
    for (const auto& wl : weyl) shifts.emplace_back(wl.det(), rp - wl.apply(rp));

    KernelTable table{w, n, {}, {}};
    for (const auto& lambda : dominant_weights(r, n)) {
        BigInt acc = 0;
        for (const auto& [sgn, shift] : shifts) {
            const Weight mu = lambda + shift;
            if (!in_region.contains(mu)) continue;
            const std::size_t j = in_region.index(mu);
            if (!in_region[j] || g[j] == 0) continue;
            BigInt term = g[j] * bigint_pow(q, static_cast<unsigned long>(d_max - depth[j]));
            if (sgn > 0) acc += term;
            else acc -= term;
        }
        const Rational scalar = Rational(acc) * common;
        table.entries.emplace(lambda, rho_n * QuadraticScalar::half_power(q, -translation_exponent(lambda)) * scalar);
        const BigInt* c = hn.find(lambda);
        table.reachable.emplace(lambda, c && *c != 0);
    }
    return table;
}

inline QuadraticScalar pn_exact(const WalkSpec& w, int n, const Weight& lambda, const KernelLimits& limits = {})
{
    if (!is_dominant(lambda)) throw std::invalid_argument("pn_exact: weight must be dominant");
    if (lambda.rank() != w.p.r) throw std::invalid_argument("pn_exact: rank mismatch");
    if (n < 0) throw std::invalid_argument("pn_exact: n must be >= 0");
    if (length(lambda) > n) return QuadraticScalar(w.p.q);
    return kernel_table(w, n, limits).value(lambda);
}

struct MassCheck {
    bool exact = false;
    QuadraticScalar total;
    QuadraticScalar defect; // total - 1
};

inline MassCheck mass_identity(const KernelTable& t)
{
    QuadraticScalar total(t.walk.p.q);
    for (const auto& [lambda, v] : t.entries) total += v * Rational(N_lambda_value(lambda, t.walk.p));
    const QuadraticScalar defect = total - QuadraticScalar(t.walk.p.q, 1);
    return {defect.is_zero(), total, defect};
}

inline MassCheck mass_identity(const WalkSpec& w, int n, const KernelLimits& limits = {})
{
    return mass_identity(kernel_table(w, n, limits));
}

// Radial distribution of the simple walk on the (q+1)-regular tree: P(distance = k after n steps).
inline std::vector<Rational> tree_radial_distribution(long q, int n)
{
    if (q < 2 || n < 0) throw std::invalid_argument("tree oracle: need q >= 2, n >= 0");
    const Rational out(q, q + 1), in(1, q + 1);
    std::vector<Rational> d(static_cast<std::size_t>(n + 1), Rational(0));
    d[0] = 1;
    for (int step = 0; step < n; ++step) {
        std::vector<Rational> nd(d.size(), Rational(0));
        for (int k = 0; k <= step; ++k) {
            const Rational& v = d[static_cast<std::size_t>(k)];
            if (v == 0) continue;
            if (k == 0) {
                nd[1] += v;
            } else {
                nd[static_cast<std::size_t>(k + 1)] += v * out;
                nd[static_cast<std::size_t>(k - 1)] += v * in;
            }
        }
        d = std::move(nd);
    }
    return d;
}

// Per-vertex probability p^n(0, x) on the tree for |x| = k.
inline Rational pn_tree_oracle(long q, int n, int k)
{
    if (k < 0) throw std::invalid_argument("tree oracle: negative distance");
    if (k > n) return 0;
    const Rational radial = tree_radial_distribution(q, n)[static_cast<std::size_t>(k)];
    if (k == 0) return radial;
    const Rational sphere = Rational(bigint_pow(q, static_cast<unsigned long>(k - 1)) * (q + 1));
    return radial / sphere;
}

inline Rational pn_tree_radial(long q, int n, int k)
{
    if (k < 0) throw std::invalid_argument("tree oracle: negative distance");
    if (k > n) return 0;
    return tree_radial_distribution(q, n)[static_cast<std::size_t>(k)];
}

} // namespace bwalk
