#pragma once

// Exact scalars used throughout the library.
//
//   Rational        arbitrary-precision rational (GMP)
//   QuadraticScalar a + b*sqrt(q) with rational a, b and a fixed integer q
//   ScalarQ         Laurent polynomial in u = q^{1/2} with rational coefficients

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace bwalk {

using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1)
{
    Rational x(num, den);
    x.canonicalize();
    return x;
}

inline Rational rational_pow(const Rational& base, long e)
{
    if (e < 0) {
        if (base == 0) throw std::domain_error("rational_pow: zero to a negative power");
        Rational inv = 1 / base;
        return rational_pow(inv, -e);
    }
    Rational out = 1;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    out.canonicalize();
    return out;
}

inline BigInt bigint_pow(long base, unsigned long e)
{
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(std::labs(base)), e);
    if (base < 0 && (e % 2 == 1)) out = -out;
    return out;
}

// Returns s such that s*s == n, or -1 when n is not a perfect square.
inline long exact_isqrt(long n)
{
    if (n < 0) return -1;
    long s = static_cast<long>(std::llround(std::sqrt(static_cast<double>(n))));
    for (long c = std::max(0L, s - 2); c <= s + 2; ++c)
        if (c * c == n) return c;
    return -1;
}

namespace detail {

// RAII wrapper over an mpfr_t, used only for exact -> floating conversion.
class MpfrValue {
public:
    explicit MpfrValue(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
    ~MpfrValue() { mpfr_clear(v_); }
    MpfrValue(const MpfrValue&) = delete;
    MpfrValue& operator=(const MpfrValue&) = delete;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

inline mpfr_prec_t precision_for(const Rational& x)
{
    const auto bits = mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2);
    return static_cast<mpfr_prec_t>(bits + 160);
}

} // namespace detail

// a + b*sqrt(q). When q is a perfect square the irrational part is folded into a,
// so equality is structural.
class QuadraticScalar {
public:
    QuadraticScalar() = default;
    explicit QuadraticScalar(long q, Rational a = 0, Rational b = 0)
        : a_(std::move(a)), b_(std::move(b)), q_(q)
    {
        if (q < 1) throw std::invalid_argument("QuadraticScalar: q must be >= 1");
        normalize();
    }

    static QuadraticScalar sqrt_q(long q) { return QuadraticScalar(q, 0, 1); }

    // q^{e/2} for any integer e.
    static QuadraticScalar half_power(long q, long e)
    {
        const long half = (e >= 0) ? e / 2 : -((-e + 1) / 2);
        const long odd = e - 2 * half; // 0 or 1
        Rational p = rational_pow(Rational(q), half);
        return odd ? QuadraticScalar(q, 0, p) : QuadraticScalar(q, p, 0);
    }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt_part() const { return b_; }
    long q() const { return q_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }

    int sign() const
    {
        const int sa = sgn(a_), sb = sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        // opposite signs: compare a^2 with b^2 q
        Rational lhs = a_ * a_, rhs = b_ * b_ * q_;
        const int c = cmp(lhs, rhs);
        if (c == 0) return 0;
        return c > 0 ? sa : sb;
    }

    QuadraticScalar& operator+=(const QuadraticScalar& o)
    {
        check(o);
        a_ += o.a_;
        b_ += o.b_;
        return *this;
    }
    QuadraticScalar& operator-=(const QuadraticScalar& o)
    {
        check(o);
        a_ -= o.a_;
        b_ -= o.b_;
        return *this;
    }
    QuadraticScalar& operator*=(const QuadraticScalar& o)
    {
        check(o);
        Rational na = a_ * o.a_ + b_ * o.b_ * q_;
        Rational nb = a_ * o.b_ + b_ * o.a_;
        a_ = std::move(na);
        b_ = std::move(nb);
        return *this;
    }
    QuadraticScalar& operator*=(const Rational& r)
    {
        a_ *= r;
        b_ *= r;
        return *this;
    }

    QuadraticScalar inverse() const
    {
        Rational norm = a_ * a_ - b_ * b_ * q_;
        if (norm == 0) throw std::domain_error("QuadraticScalar: inverse of zero");
        return QuadraticScalar(q_, a_ / norm, -b_ / norm);
    }

    QuadraticScalar& operator/=(const QuadraticScalar& o) { return *this *= o.inverse(); }

    QuadraticScalar pow(long e) const
    {
        if (e < 0) return inverse().pow(-e);
        QuadraticScalar out(q_, 1, 0), base = *this;
        while (e > 0) {
            if (e & 1) out *= base;
            base *= base;
            e >>= 1;
        }
        return out;
    }

    friend QuadraticScalar operator+(QuadraticScalar x, const QuadraticScalar& y) { return x += y; }
    friend QuadraticScalar operator-(QuadraticScalar x, const QuadraticScalar& y) { return x -= y; }
    friend QuadraticScalar operator*(QuadraticScalar x, const QuadraticScalar& y) { return x *= y; }
    friend QuadraticScalar operator*(QuadraticScalar x, const Rational& y) { return x *= y; }
    friend QuadraticScalar operator*(const Rational& y, QuadraticScalar x) { return x *= y; }
    friend QuadraticScalar operator/(QuadraticScalar x, const QuadraticScalar& y) { return x /= y; }
    QuadraticScalar operator-() const { return QuadraticScalar(q_, -a_, -b_); }

    friend bool operator==(const QuadraticScalar& x, const QuadraticScalar& y)
    {
        return x.q_ == y.q_ && x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator==(const QuadraticScalar& x, const Rational& y) { return x.b_ == 0 && x.a_ == y; }

    // Natural log of a positive value, accurate even when a and b nearly cancel.
    double log() const
    {
        if (sign() <= 0) throw std::domain_error("QuadraticScalar::log of non-positive value");
        detail::MpfrValue v(working_bits());
        evaluate_into(v.get());
        mpfr_log(v.get(), v.get(), MPFR_RNDN);
        return mpfr_get_d(v.get(), MPFR_RNDN);
    }

    long double to_long_double() const
    {
        detail::MpfrValue v(working_bits());
        evaluate_into(v.get());
        return mpfr_get_ld(v.get(), MPFR_RNDN);
    }
    double to_double() const { return static_cast<double>(to_long_double()); }

    std::string to_string() const
    {
        std::ostringstream os;
        os << *this;
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadraticScalar& x)
    {
        if (x.b_ == 0) return os << x.a_;
        if (x.a_ != 0) os << x.a_ << (x.b_ > 0 ? " + " : " - ");
        else if (x.b_ < 0) os << "-";
        Rational ab = abs(x.b_);
        if (ab != 1) os << ab << "*";
        return os << "sqrt(" << x.q_ << ")";
    }

private:
    void check(const QuadraticScalar& o)
    {
        if (q_ == 0) q_ = o.q_; // default-constructed zero adopts the partner's field
        if (o.q_ != 0 && o.q_ != q_) throw std::invalid_argument("QuadraticScalar: mismatched q");
    }
    void normalize()
    {
        const long s = exact_isqrt(q_);
        if (s >= 0 && b_ != 0) {
            a_ += b_ * s;
            b_ = 0;
        }
    }
    mpfr_prec_t working_bits() const
    {
        return std::max(detail::precision_for(a_), detail::precision_for(b_)) + 64;
    }
    void evaluate_into(mpfr_ptr out) const
    {
        const mpfr_prec_t bits = mpfr_get_prec(out);
        detail::MpfrValue t(bits);
        mpfr_set_q(out, a_.get_mpq_t(), MPFR_RNDN);
        if (b_ != 0) {
            mpfr_set_si(t.get(), q_, MPFR_RNDN);
            mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
            detail::MpfrValue bb(bits);
            mpfr_set_q(bb.get(), b_.get_mpq_t(), MPFR_RNDN);
            mpfr_mul(t.get(), t.get(), bb.get(), MPFR_RNDN);
            mpfr_add(out, out, t.get(), MPFR_RNDN);
        }
    }

    Rational a_ = 0;
    Rational b_ = 0;
    long q_ = 0;
};

// Natural log of a positive rational without overflow for huge numerators/denominators.
inline double log_rational(const Rational& x)
{
    if (x <= 0) throw std::domain_error("log_rational: non-positive argument");
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, x.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
    return std::log(mn) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0);
}

// Laurent polynomial in u = q^{1/2}: sum_k c_k u^k.
class ScalarQ {
public:
    ScalarQ() = default;
    ScalarQ(const Rational& c) { if (c != 0) terms_[0] = c; } // NOLINT: implicit constant
    static ScalarQ monomial(long k, const Rational& c = 1)
    {
        ScalarQ s;
        if (c != 0) s.terms_[k] = c;
        return s;
    }
    // q^e as u^{2e}
    static ScalarQ q_power(long e) { return monomial(2 * e); }

    const std::map<long, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rational coeff(long k) const
    {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second;
    }
    long min_degree() const { return terms_.empty() ? 0 : terms_.begin()->first; }
    long max_degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    ScalarQ& operator+=(const ScalarQ& o)
    {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    ScalarQ& operator-=(const ScalarQ& o)
    {
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    friend ScalarQ operator*(const ScalarQ& x, const ScalarQ& y)
    {
        ScalarQ out;
        for (const auto& [i, a] : x.terms_)
            for (const auto& [j, b] : y.terms_) out.add_term(i + j, a * b);
        return out;
    }
    ScalarQ& operator*=(const ScalarQ& o) { return *this = *this * o; }
    friend ScalarQ operator+(ScalarQ x, const ScalarQ& y) { return x += y; }
    friend ScalarQ operator-(ScalarQ x, const ScalarQ& y) { return x -= y; }
    friend bool operator==(const ScalarQ& x, const ScalarQ& y) { return x.terms_ == y.terms_; }

    // Exact division; throws when the divisor does not divide this polynomial.
    ScalarQ divided_by(const ScalarQ& d) const
    {
        if (d.is_zero()) throw std::domain_error("ScalarQ: division by zero");
        ScalarQ rem = *this, quot;
        const long dlead = d.max_degree();
        const Rational lc = d.coeff(dlead);
        const long dspan = dlead - d.min_degree();
        while (!rem.is_zero()) {
            const long k = rem.max_degree();
            if (k - rem.min_degree() < dspan)
                throw std::domain_error("ScalarQ: inexact division");
            ScalarQ t = monomial(k - dlead, rem.coeff(k) / lc);
            quot += t;
            rem -= t * d;
        }
        return quot;
    }

    QuadraticScalar evaluate(long q) const
    {
        QuadraticScalar out(q);
        for (const auto& [k, c] : terms_) out += QuadraticScalar::half_power(q, k) * c;
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const ScalarQ& s)
    {
        if (s.terms_.empty()) return os << "0";
        bool first = true;
        for (auto it = s.terms_.rbegin(); it != s.terms_.rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            os << it->second;
            if (it->first != 0) os << "*u^" << it->first;
        }
        return os;
    }

private:
    void add_term(long k, const Rational& c)
    {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    std::map<long, Rational> terms_;
};

} // namespace bwalk
