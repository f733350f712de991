#pragma once

// A_r root system in the sum-zero hyperplane of R^{r+1}.
//
// alpha_i = e_i - e_{i+1}, lambda_i = e_1 + ... + e_i - (i/(r+1)) * 1, so |alpha|^2 = 2
// and coroots coincide with roots. A weight is stored by its fundamental coordinates m;
// its integer ambient representative is v_j = m_j + ... + m_r (v_{r+1} = 0), defined
// modulo the all-ones vector. Pairings with roots only see differences of v.

#include "bwalk/scalar.hpp"

#include <algorithm>
#include <compare>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwalk {

struct RankParams {
    int r = 1;
    long q = 2;

    RankParams() = default;
    RankParams(int rank, long thickness) : r(rank), q(thickness) { validate(); }

    void validate() const
    {
        if (r < 1) throw std::invalid_argument("rank must be >= 1");
        if (q < 2) throw std::invalid_argument("q must be an integer >= 2");
    }
    int num_positive_roots() const { return r * (r + 1) / 2; }
    friend bool operator==(const RankParams&, const RankParams&) = default;
};

struct Weight {
    std::vector<int> m;

    Weight() = default;
    explicit Weight(std::vector<int> coords) : m(std::move(coords)) {}
    Weight(std::initializer_list<int> coords) : m(coords) {}

    static Weight zero(int r) { return Weight(std::vector<int>(static_cast<std::size_t>(r), 0)); }
    static Weight fundamental(int r, int k)
    {
        if (k < 1 || k > r) throw std::invalid_argument("fundamental weight index out of range");
        Weight w = zero(r);
        w.m[static_cast<std::size_t>(k - 1)] = 1;
        return w;
    }

    int rank() const { return static_cast<int>(m.size()); }
    int operator[](int i) const { return m[static_cast<std::size_t>(i)]; }
    int& operator[](int i) { return m[static_cast<std::size_t>(i)]; }

    Weight& operator+=(const Weight& o)
    {
        check(o);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += o.m[i];
        return *this;
    }
    Weight& operator-=(const Weight& o)
    {
        check(o);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] -= o.m[i];
        return *this;
    }
    friend Weight operator+(Weight a, const Weight& b) { return a += b; }
    friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
    friend Weight operator*(int k, Weight a)
    {
        for (auto& x : a.m) x *= k;
        return a;
    }
    Weight operator-() const { return -1 * *this; }

    friend auto operator<=>(const Weight&, const Weight&) = default;
    friend bool operator==(const Weight&, const Weight&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Weight& w)
    {
        os << "(";
        for (std::size_t i = 0; i < w.m.size(); ++i) os << (i ? "," : "") << w.m[i];
        return os << ")";
    }
    std::string to_string() const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
        return s + ")";
    }

private:
    void check(const Weight& o) const
    {
        if (o.m.size() != m.size()) throw std::invalid_argument("weight rank mismatch");
    }
};

using Vector = std::vector<Rational>;

inline int length(const Weight& w) { return std::accumulate(w.m.begin(), w.m.end(), 0); }
inline bool is_dominant(const Weight& w)
{
    return std::all_of(w.m.begin(), w.m.end(), [](int x) { return x >= 0; });
}
inline bool is_strictly_dominant(const Weight& w)
{
    return std::all_of(w.m.begin(), w.m.end(), [](int x) { return x > 0; });
}

// Integer ambient representative v with v_{r+1} = 0.
inline std::vector<long> ambient(const Weight& w)
{
    const int r = w.rank();
    std::vector<long> v(static_cast<std::size_t>(r + 1), 0);
    for (int j = r - 1; j >= 0; --j) v[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j + 1)] + w[j];
    return v;
}

inline Weight from_ambient(const std::vector<long>& v)
{
    if (v.size() < 2) throw std::invalid_argument("ambient vector needs at least two coordinates");
    Weight w = Weight::zero(static_cast<int>(v.size()) - 1);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) w.m[j] = static_cast<int>(v[j] - v[j + 1]);
    return w;
}

// Exact sum-zero embedding into R^{r+1}.
inline Vector embed(const Weight& w)
{
    const auto v = ambient(w);
    Rational mean(std::accumulate(v.begin(), v.end(), 0L), static_cast<long>(v.size()));
    mean.canonicalize();
    Vector out;
    out.reserve(v.size());
    for (long x : v) out.emplace_back(Rational(x) - mean);
    return out;
}

inline Rational inner(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Positive root e_a - e_b (0-based, a < b).
struct Root {
    int a = 0;
    int b = 1;
    friend bool operator==(const Root&, const Root&) = default;
    int height() const { return b - a; }
};

inline std::vector<Root> positive_root_list(int r)
{
    std::vector<Root> out;
    for (int a = 0; a <= r; ++a)
        for (int b = a + 1; b <= r; ++b) out.push_back({a, b});
    return out;
}

inline Vector root_vector(const Root& al, int r)
{
    Vector v(static_cast<std::size_t>(r + 1), Rational(0));
    v[static_cast<std::size_t>(al.a)] = 1;
    v[static_cast<std::size_t>(al.b)] = -1;
    return v;
}

inline std::vector<Vector> positive_roots(const RankParams& p)
{
    std::vector<Vector> out;
    for (const auto& al : positive_root_list(p.r)) out.push_back(root_vector(al, p.r));
    return out;
}

// The root e_a - e_b as a weight (fundamental coordinates).
inline Weight root_weight(const Root& al, int r)
{
    std::vector<long> v(static_cast<std::size_t>(r + 1), 0);
    v[static_cast<std::size_t>(al.a)] += 1;
    v[static_cast<std::size_t>(al.b)] -= 1;
    return from_ambient(v);
}

inline Weight simple_root_weight(int r, int i) { return root_weight({i, i + 1}, r); }

// <alpha^vee, lambda> = v_a - v_b.
inline long pairing(const Root& al, const Weight& w)
{
    const auto v = ambient(w);
    return v[static_cast<std::size_t>(al.a)] - v[static_cast<std::size_t>(al.b)];
}

inline Weight rho_P(int r) { return Weight(std::vector<int>(static_cast<std::size_t>(r), 1)); }

// W_0 lambda_k: all 0/1 ambient vectors with k ones.
inline std::vector<Weight> weyl_orbit(int r, int k)
{
    if (k < 1 || k > r) throw std::invalid_argument("weyl_orbit: k out of range");
    std::vector<long> v(static_cast<std::size_t>(r + 1), 0);
    std::fill(v.begin(), v.begin() + k, 1);
    std::vector<Weight> out;
    std::sort(v.begin(), v.end());
    do {
        out.push_back(from_ambient(v));
    } while (std::next_permutation(v.begin(), v.end()));
    std::sort(out.begin(), out.end());
    return out;
}

// All one-step displacements of the simple walk: union of the fundamental orbits.
inline std::vector<Weight> walk_steps(int r)
{
    std::vector<Weight> out;
    for (int k = 1; k <= r; ++k) {
        auto o = weyl_orbit(r, k);
        out.insert(out.end(), o.begin(), o.end());
    }
    return out;
}

// pi^I(lambda) = prod_{alpha in I} <alpha^vee, lambda>; I defaults to R^+.
inline BigInt pi(const Weight& w, const std::optional<std::vector<Root>>& subset = std::nullopt)
{
    const auto v = ambient(w);
    BigInt p = 1;
    const auto roots = subset ? *subset : positive_root_list(w.rank());
    for (const auto& al : roots) p *= BigInt(v[static_cast<std::size_t>(al.a)] - v[static_cast<std::size_t>(al.b)]);
    return p;
}

// E(lambda) = sum_{alpha > 0} <alpha^vee, lambda> = sum_i m_i * i * (r+1-i).
inline long translation_exponent(const Weight& w)
{
    const long r = w.rank();
    long e = 0;
    for (long i = 1; i <= r; ++i) e += static_cast<long>(w[static_cast<int>(i - 1)]) * i * (r + 1 - i);
    return e;
}

inline ScalarQ q_t_lambda(const Weight& w, const RankParams& p)
{
    if (w.rank() != p.r) throw std::invalid_argument("q_t_lambda: rank mismatch");
    if (!is_dominant(w)) throw std::invalid_argument("q_t_lambda: weight must be dominant");
    return ScalarQ::q_power(translation_exponent(w));
}

// Weyl group element as a permutation of r+1 letters: (w v)_j = v_{perm[j]}.
struct WeylElement {
    std::vector<int> perm;

    static WeylElement identity(int r)
    {
        WeylElement w;
        w.perm.resize(static_cast<std::size_t>(r + 1));
        std::iota(w.perm.begin(), w.perm.end(), 0);
        return w;
    }
    int length() const
    {
        int inv = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            for (std::size_t j = i + 1; j < perm.size(); ++j)
                if (perm[i] > perm[j]) ++inv;
        return inv;
    }
    int det() const { return (length() % 2 == 0) ? 1 : -1; }

    template <class T>
    std::vector<T> apply_ambient(const std::vector<T>& v) const
    {
        std::vector<T> out(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[static_cast<std::size_t>(perm[j])];
        return out;
    }
    Weight apply(const Weight& w) const { return from_ambient(apply_ambient(ambient(w))); }
};

inline std::vector<WeylElement> weyl_group(int r)
{
    std::vector<WeylElement> out;
    WeylElement w = WeylElement::identity(r);
    do {
        out.push_back(w);
    } while (std::next_permutation(w.perm.begin(), w.perm.end()));
    return out;
}

// Dominant representative of the W_0-orbit of w (sort ambient coordinates descending).
inline Weight dominant_representative(const Weight& w)
{
    auto v = ambient(w);
    std::sort(v.begin(), v.end(), std::greater<>());
    return from_ambient(v);
}

// Sizes of the blocks of equal ambient coordinates of a dominant weight; these
// are the factors of the stabilizer W_{0 lambda} = prod S_{b}.
inline std::vector<int> stabilizer_blocks(const Weight& w)
{
    if (!is_dominant(w)) throw std::invalid_argument("stabilizer_blocks: weight must be dominant");
    std::vector<int> blocks;
    int run = 1;
    for (int i = 0; i < w.rank(); ++i) {
        if (w[i] == 0) {
            ++run;
        } else {
            blocks.push_back(run);
            run = 1;
        }
    }
    blocks.push_back(run);
    return blocks;
}

namespace detail {

// prod_{k=1}^{b} [k]_{q^{-1}} with [k]_t = 1 + t + ... + t^{k-1}, as a polynomial in u.
inline ScalarQ q_factorial_inverse(int b)
{
    ScalarQ out = Rational(1);
    for (int k = 1; k <= b; ++k) {
        ScalarQ bracket;
        for (int i = 0; i < k; ++i) bracket += ScalarQ::q_power(-i);
        out *= bracket;
    }
    return out;
}

} // namespace detail

enum class Subgroup { full, stabilizer };

// V(q^{-1}) = sum_{w in V} q^{-l(w)} for V = W_0 or the stabilizer of a dominant weight.
inline ScalarQ poincare(Subgroup which, const RankParams& p, const std::optional<Weight>& w = std::nullopt)
{
    if (which == Subgroup::full) return detail::q_factorial_inverse(p.r + 1);
    if (!w) throw std::invalid_argument("poincare: stabilizer requires a weight");
    ScalarQ out = Rational(1);
    for (int b : stabilizer_blocks(*w)) out *= detail::q_factorial_inverse(b);
    return out;
}

inline ScalarQ N_lambda(const Weight& w, const RankParams& p)
{
    const ScalarQ ratio = poincare(Subgroup::full, p).divided_by(poincare(Subgroup::stabilizer, p, w));
    return ratio * q_t_lambda(w, p);
}

// |V_lambda(x)| at the configured q; always a positive integer.
inline BigInt N_lambda_value(const Weight& w, const RankParams& p)
{
    // q-multinomial [r+1; blocks]_q times q^{E - l(w_0) + sum l(w_0,b)}
    auto qint = [&](int k) {
        BigInt s = 0, t = 1;
        for (int i = 0; i < k; ++i) {
            s += t;
            t *= p.q;
        }
        return s;
    };
    auto qfact = [&](int b) {
        BigInt f = 1;
        for (int k = 1; k <= b; ++k) f *= qint(k);
        return f;
    };
    BigInt num = qfact(p.r + 1), den = 1;
    long shift = translation_exponent(w) - static_cast<long>(p.r) * (p.r + 1) / 2;
    for (int b : stabilizer_blocks(w)) {
        den *= qfact(b);
        shift += static_cast<long>(b) * (b - 1) / 2;
    }
    BigInt out = num / den;
    if (shift < 0) throw std::logic_error("N_lambda_value: negative q-exponent");
    out *= bigint_pow(p.q, static_cast<unsigned long>(shift));
    return out;
}

// All dominant weights with length <= max_length, in lexicographic order of m.
inline std::vector<Weight> dominant_weights(int r, int max_length)
{
    std::vector<Weight> out;
    if (max_length < 0) return out;
    Weight w = Weight::zero(r);
    while (true) {
        out.push_back(w);
        int i = r - 1;
        while (i >= 0) {
            ++w[i];
            if (length(w) <= max_length) break;
            w[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Scaled root-basis coordinates: (r+1) * <nu, lambda_j> = sum_i m_i((r+1)min(i,j) - ij).
// Nonnegativity of all entries means nu lies in the cone spanned by positive roots.
inline std::vector<long> scaled_root_coordinates(const Weight& w)
{
    const long r = w.rank();
    std::vector<long> c(static_cast<std::size_t>(r), 0);
    for (long j = 1; j <= r; ++j) {
        long s = 0;
        for (long i = 1; i <= r; ++i) s += static_cast<long>(w[static_cast<int>(i - 1)]) * ((r + 1) * std::min(i, j) - i * j);
        c[static_cast<std::size_t>(j - 1)] = s;
    }
    return c;
}

} // namespace bwalk
