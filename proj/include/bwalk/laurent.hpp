#pragma once

// Finitely supported functions on the weight lattice (formal sums of e^mu).

#include "bwalk/root_system.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bwalk {

template <class Coeff = Rational>
class LaurentPoly {
public:
    using map_type = std::map<Weight, Coeff>;

    LaurentPoly() = default;
    explicit LaurentPoly(int r) : r_(r) {}

    static LaurentPoly monomial(const Weight& mu, const Coeff& c = Coeff(1))
    {
        LaurentPoly f(mu.rank());
        f.add_term(mu, c);
        return f;
    }
    static LaurentPoly constant(int r, const Coeff& c) { return monomial(Weight::zero(r), c); }

    int rank() const { return r_; }
    const map_type& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    Coeff coeff(const Weight& mu) const
    {
        auto it = terms_.find(mu);
        return it == terms_.end() ? Coeff(0) : it->second;
    }

    void add_term(const Weight& mu, const Coeff& c)
    {
        if (c == 0) return;
        if (r_ == 0) r_ = mu.rank();
        auto [it, inserted] = terms_.try_emplace(mu, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    LaurentPoly& operator+=(const LaurentPoly& o)
    {
        for (const auto& [mu, c] : o.terms_) add_term(mu, c);
        return *this;
    }
    LaurentPoly& operator-=(const LaurentPoly& o)
    {
        for (const auto& [mu, c] : o.terms_) add_term(mu, -c);
        return *this;
    }
    LaurentPoly& operator*=(const Coeff& k)
    {
        if (k == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [mu, c] : terms_) c *= k;
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(LaurentPoly a, const Coeff& k) { return a *= k; }
    friend LaurentPoly operator*(const Coeff& k, LaurentPoly a) { return a *= k; }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b)
    {
        LaurentPoly out(a.r_ ? a.r_ : b.r_);
        for (const auto& [x, c] : a.terms_)
            for (const auto& [y, d] : b.terms_) out.add_term(x + y, c * d);
        return out;
    }
    LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.terms_ == b.terms_; }

    // Multiply by e^mu.
    LaurentPoly shifted(const Weight& mu) const
    {
        LaurentPoly out(r_);
        for (const auto& [x, c] : terms_) out.terms_.emplace(x + mu, c);
        return out;
    }

    Coeff total_mass() const
    {
        Coeff s(0);
        for (const auto& [mu, c] : terms_) s += c;
        return s;
    }

    // f(w^{-1} .) : coefficient of w mu in the result equals coefficient of mu here.
    LaurentPoly weyl_image(const WeylElement& w) const
    {
        LaurentPoly out(r_);
        for (const auto& [mu, c] : terms_) out.terms_.emplace(w.apply(mu), c);
        return out;
    }

private:
    int r_ = 0;
    map_type terms_;
};

using RationalLaurent = LaurentPoly<Rational>;

// h = sum_k sum_{mu in W_0 lambda_k} e^mu; the rank-2 weighted variant uses p1 on
// W_0 lambda_1 and p2 on W_0 lambda_2.
inline RationalLaurent h_poly(const RankParams& p,
                              const std::optional<std::pair<Rational, Rational>>& weights = std::nullopt)
{
    if (weights && p.r != 2) throw std::invalid_argument("h_poly: weighted variant requires rank 2");
    RationalLaurent h(p.r);
    for (int k = 1; k <= p.r; ++k) {
        Rational c = 1;
        if (weights) {
            c = (k == 1) ? weights->first : weights->second;
            if (c <= 0) throw std::invalid_argument("h_poly: weights must be positive");
        }
        for (const auto& mu : weyl_orbit(p.r, k)) h.add_term(mu, c);
    }
    return h;
}

template <class Coeff>
LaurentPoly<Coeff> pow(const LaurentPoly<Coeff>& f, int n)
{
    if (n < 0) throw std::invalid_argument("pow: negative exponent");
    auto out = LaurentPoly<Coeff>::constant(f.rank(), Coeff(1));
    for (int i = 0; i < n; ++i) out = out * f;
    return out;
}

// Alternating form sum_w det(w) e^{w rho_P}.
inline RationalLaurent weyl_denominator(const RankParams& p)
{
    RationalLaurent d(p.r);
    const Weight rp = rho_P(p.r);
    for (const auto& w : weyl_group(p.r)) d.add_term(w.apply(rp), Rational(w.det()));
    return d;
}

// Product form prod_{alpha > 0} (e^{alpha/2} - e^{-alpha/2}) on the doubled lattice:
// keys are 2*mu, so half-roots become integral.
inline RationalLaurent weyl_denominator_product_doubled(const RankParams& p)
{
    auto out = RationalLaurent::constant(p.r, Rational(1));
    for (const auto& al : positive_root_list(p.r)) {
        const Weight a = root_weight(al, p.r);
        RationalLaurent factor(p.r);
        factor.add_term(a, Rational(1));
        factor.add_term(-a, Rational(-1));
        out = out * factor;
    }
    return out;
}

// Rescale keys mu -> 2 mu so alternating and product forms can be compared.
template <class Coeff>
LaurentPoly<Coeff> doubled(const LaurentPoly<Coeff>& f)
{
    LaurentPoly<Coeff> out(f.rank());
    for (const auto& [mu, c] : f.terms()) out.add_term(2 * mu, c);
    return out;
}

// pi^I(d): e^mu -> pi^I(mu) e^mu.
template <class Coeff>
LaurentPoly<Coeff> pi_derivative(const LaurentPoly<Coeff>& f, const std::optional<std::vector<Root>>& subset = std::nullopt)
{
    LaurentPoly<Coeff> out(f.rank());
    for (const auto& [mu, c] : f.terms()) {
        const BigInt k = pi(mu, subset);
        if (k != 0) out.add_term(mu, c * Coeff(k));
    }
    return out;
}

// Exact quotient f / (1 - e^{-alpha}), or nullopt when it does not exist.
// g(mu) = sum_{k >= 0} f(mu + k alpha), computed line by line.
template <class Coeff>
std::optional<LaurentPoly<Coeff>> divide_by_one_minus(const LaurentPoly<Coeff>& f, const Root& al)
{
    const int r = f.rank();
    const Weight a = root_weight(al, r);
    // line id: mu - t*alpha with t = floor(<alpha, mu>/2); position t along the line
    std::map<Weight, std::map<long, Coeff>> lines;
    for (const auto& [mu, c] : f.terms()) {
        const long pr = pairing(al, mu);
        const long t = (pr >= 0) ? pr / 2 : -((-pr + 1) / 2);
        lines[mu - static_cast<int>(t) * a][t] += c;
    }
    LaurentPoly<Coeff> g(r);
    for (const auto& [base, pts] : lines) {
        Coeff run(0);
        const long tmin = pts.begin()->first;
        const long tmax = pts.rbegin()->first;
        for (long t = tmax; t >= tmin; --t) {
            auto it = pts.find(t);
            if (it != pts.end()) run += it->second;
            if (run != 0) g.add_term(base + static_cast<int>(t) * a, run);
        }
        if (run != 0) return std::nullopt;
    }
    return g;
}

// Exact quotient by the Weyl denominator, verified by multiplication.
template <class Coeff>
std::optional<LaurentPoly<Coeff>> divide_by_delta(const LaurentPoly<Coeff>& f)
{
    const int r = f.rank();
    if (f.is_zero()) return f;
    // Delta = e^{rho_P} prod_{alpha > 0} (1 - e^{-alpha})
    LaurentPoly<Coeff> g = f.shifted(-rho_P(r));
    for (const auto& al : positive_root_list(r)) {
        auto next = divide_by_one_minus(g, al);
        if (!next) return std::nullopt;
        g = std::move(*next);
    }
    const RationalLaurent alt = weyl_denominator(RankParams(r, 2));
    LaurentPoly<Coeff> delta(r);
    for (const auto& [mu, c] : alt.terms()) delta.add_term(mu, Coeff(c));
    if (!(g * delta == f)) return std::nullopt;
    return g;
}

// True when coeff(w mu) = det(w) coeff(mu) for all w.
template <class Coeff>
bool is_skew_invariant(const LaurentPoly<Coeff>& f)
{
    for (const auto& w : weyl_group(f.rank())) {
        const Coeff s(w.det());
        for (const auto& [mu, c] : f.terms())
            if (f.coeff(w.apply(mu)) != s * c) return false;
    }
    return true;
}

template <class Coeff>
bool is_weyl_invariant(const LaurentPoly<Coeff>& f)
{
    for (const auto& w : weyl_group(f.rank()))
        for (const auto& [mu, c] : f.terms())
            if (f.coeff(w.apply(mu)) != c) return false;
    return true;
}

} // namespace bwalk
