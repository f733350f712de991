#pragma once

// Radial (sphere-aggregated) transition chain of the walk.
//
// From a vertex with radial part lambda, the N_k neighbours of type k split over radial
// parts mu = dom(lambda + eps), eps in W_0 lambda_k. Straightening lambda + eps to the
// dominant chamber by simple reflections (each costs a factor q^{-1}) gives
//   count(lambda, k, mu) = q^{(E_k + E_mu - E_lambda)/2} * sum q^{-#reflections},
// an integer; the counts over mu sum to N_k.

#include "bwalk/exact_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>
#include <stdexcept>
#include <vector>

namespace bwalk {

struct RadialTransition {
    Weight target;
    int k = 1;      // step type
    BigInt count;   // number of type-k neighbours with this radial part
};

// Returns (dominant weight, number of reflections) for lambda + eps.
inline std::pair<Weight, int> straighten(Weight mu)
{
    int reflections = 0;
    const int r = mu.rank();
    while (true) {
        int j = -1;
        for (int i = 0; i < r; ++i)
            if (mu[i] < 0) {
                j = i;
                break;
            }
        if (j < 0) return {mu, reflections};
        if (mu[j] < -1) throw std::logic_error("straighten: coordinate below -1");
        // s_j mu = mu - <alpha_j, mu> alpha_j = mu + alpha_j
        mu += simple_root_weight(r, j);
        ++reflections;
    }
}

inline std::vector<RadialTransition> radial_transitions(const Weight& lambda, const RankParams& p)
{
    if (!is_dominant(lambda)) throw std::invalid_argument("radial_transitions: weight must be dominant");
    std::vector<RadialTransition> out;
    const long e_lambda = translation_exponent(lambda);
    for (int k = 1; k <= p.r; ++k) {
        const long e_k = translation_exponent(Weight::fundamental(p.r, k));
        std::map<Weight, std::vector<int>> hits;
        for (const auto& eps : weyl_orbit(p.r, k)) {
            auto [mu, refl] = straighten(lambda + eps);
            hits[mu].push_back(refl);
        }
        for (const auto& [mu, refls] : hits) {
            const long twice = e_k + translation_exponent(mu) - e_lambda;
            if (twice % 2 != 0) throw std::logic_error("radial_transitions: odd exponent");
            Rational c = 0;
            for (int f : refls) c += rational_pow(Rational(p.q), twice / 2 - f);
            if (c.get_den() != 1) throw std::logic_error("radial_transitions: non-integral count");
            out.push_back({mu, k, c.get_num()});
        }
    }
    return out;
}

// Dominant weights with sum of coordinates equal to len, lexicographically increasing.
inline std::vector<Weight> dominant_weights_of_length(int r, int len)
{
    std::vector<Weight> out;
    std::vector<int> m(static_cast<std::size_t>(r), 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == r - 1) {
            m[static_cast<std::size_t>(i)] = left;
            out.push_back(Weight{m});
            return;
        }
        for (int v = 0; v <= left; ++v) {
            m[static_cast<std::size_t>(i)] = v;
            self(self, i + 1, left - v);
        }
    };
    rec(rec, 0, len);
    return out;
}

// Evolution of pbar^n(lambda) = N_lambda p^n(0, x_lambda) over dominant weights.
// Scalar is QuadraticScalar (exact) or a floating type. Nodes are added one length
// layer at a time; max_steps < 0 means unbounded.
template <class Scalar>
class RadialChain {
public:
    explicit RadialChain(const WalkSpec& w, int max_steps = -1) : walk_(w), max_steps_(max_steps)
    {
        for (int k = 1; k <= w.p.r; ++k) prob_.push_back(convert(step_probability(w, k)));
        prefix_.push_back(0);
        add_layer();
        dist_[0] = constant(1);
    }

    int steps() const { return n_; }
    int max_steps() const { return max_steps_; }
    const std::vector<Weight>& nodes() const { return nodes_; }

    // Nodes of length <= n, the support of the current distribution.
    std::size_t active_count() const { return prefix_[static_cast<std::size_t>(n_ + 1)]; }

    Scalar radial_value(const Weight& lambda) const
    {
        if (lambda.rank() != walk_.p.r || !is_dominant(lambda)) throw std::invalid_argument("RadialChain: bad weight");
        auto it = index_.find(lambda);
        if (it == index_.end()) return constant(0);
        return dist_[it->second];
    }

    // p^n(0, x) for a vertex x with radial part lambda.
    Scalar vertex_value(const Weight& lambda) const
    {
        return radial_value(lambda) / convert_int(N_lambda_value(lambda, walk_.p));
    }

    void step()
    {
        if (max_steps_ >= 0 && n_ >= max_steps_) throw std::out_of_range("RadialChain: max_steps reached");
        add_layer();
        std::vector<Scalar> next(dist_.size(), constant(0));
        const std::size_t active = active_count();
        for (std::size_t i = 0; i < active; ++i) {
            if (is_zero(dist_[i])) continue;
            for (const auto& e : edges(i)) next[e.target] += dist_[i] * e.weight;
        }
        dist_ = std::move(next);
        ++n_;
    }

private:
    struct Edge {
        std::size_t target;
        Scalar weight;
    };

    void add_layer()
    {
        const int len = static_cast<int>(prefix_.size()) - 1;
        for (auto& x : dominant_weights_of_length(walk_.p.r, len)) {
            index_.emplace(x, nodes_.size());
            nodes_.push_back(std::move(x));
        }
        prefix_.push_back(nodes_.size());
        dist_.resize(nodes_.size(), constant(0));
        edges_.resize(nodes_.size());
    }

    const std::vector<Edge>& edges(std::size_t i)
    {
        auto& out = edges_[i];
        if (!out.empty()) return out;
        std::map<std::size_t, Scalar> acc;
        for (const auto& t : radial_transitions(nodes_[i], walk_.p)) {
            const std::size_t j = index_.at(t.target);
            auto it = acc.find(j);
            const Scalar w = prob_[static_cast<std::size_t>(t.k - 1)] * convert_int(t.count);
            if (it == acc.end()) acc.emplace(j, w);
            else it->second += w;
        }
        for (auto& [j, w] : acc) out.push_back({j, w});
        return out;
    }

    Scalar constant(long v) const
    {
        if constexpr (std::is_same_v<Scalar, QuadraticScalar>) return QuadraticScalar(walk_.p.q, Rational(v));
        else return static_cast<Scalar>(v);
    }
    static Scalar convert(const QuadraticScalar& x)
    {
        if constexpr (std::is_same_v<Scalar, QuadraticScalar>) return x;
        else return static_cast<Scalar>(x.to_long_double());
    }
    Scalar convert_int(const BigInt& x) const
    {
        if constexpr (std::is_same_v<Scalar, QuadraticScalar>) return QuadraticScalar(walk_.p.q, Rational(x));
        else return static_cast<Scalar>(QuadraticScalar(walk_.p.q, Rational(x)).to_long_double());
    }
    static bool is_zero(const Scalar& v)
    {
        if constexpr (std::is_same_v<Scalar, QuadraticScalar>) return v.is_zero();
        else return v == Scalar(0);
    }

    WalkSpec walk_;
    int max_steps_ = -1;
    std::vector<Scalar> prob_;
    std::vector<Weight> nodes_;
    std::map<Weight, std::size_t> index_;
    std::vector<std::size_t> prefix_; // prefix_[L + 1] = number of nodes of length <= L
    std::vector<Scalar> dist_;
    std::vector<std::vector<Edge>> edges_;
    int n_ = 0;
};

} // namespace bwalk
