#pragma once

// Convex saddle-point problems for h.
//
// Coordinates: a real shift s = sum_i x_i alpha_i is stored by its simple-root
// coordinates x; a target delta = sum_i d_i lambda_i by its fundamental coordinates
// d_i = <delta, alpha_i>. Then <mu, s> = m . x for a weight mu and <delta, s> = d . x,
// and the length functional <delta, highest coroot> is sum_i d_i.

#include "bwalk/exact_kernel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bwalk {

using SReal = long double;
using SVec = Eigen::Matrix<SReal, Eigen::Dynamic, 1>;
using SMat = Eigen::Matrix<SReal, Eigen::Dynamic, Eigen::Dynamic>;

// Weighted exponential sum x -> sum_k w_k exp(m_k . x), evaluated stably.
class ExpSum {
public:
    explicit ExpSum(const WalkSpec& walk) : r_(walk.p.r)
    {
        for (int k = 1; k <= r_; ++k) {
            const SReal w = static_cast<SReal>(walk.orbit_weight(k).get_d());
            for (const auto& mu : weyl_orbit(r_, k)) {
                SVec m(r_);
                for (int i = 0; i < r_; ++i) m(i) = mu[i];
                exps_.push_back(m);
                logw_.push_back(std::log(w));
            }
        }
    }

    int rank() const { return r_; }

    struct Eval {
        SReal log_value = 0; // log h(x)
        SVec mean;           // grad log h = E[m]
        SMat cov;            // Hess log h = Cov[m]
    };

    Eval evaluate(const SVec& x, bool with_cov = true) const
    {
        std::vector<SReal> a(exps_.size());
        SReal amax = -std::numeric_limits<SReal>::infinity();
        for (std::size_t k = 0; k < exps_.size(); ++k) {
            a[k] = exps_[k].dot(x) + logw_[k];
            amax = std::max(amax, a[k]);
        }
        SReal z = 0;
        for (auto& v : a) {
            v = std::exp(v - amax);
            z += v;
        }
        Eval e;
        e.log_value = amax + std::log(z);
        e.mean = SVec::Zero(r_);
        for (std::size_t k = 0; k < exps_.size(); ++k) e.mean += (a[k] / z) * exps_[k];
        if (with_cov) {
            e.cov = SMat::Zero(r_, r_);
            for (std::size_t k = 0; k < exps_.size(); ++k) {
                const SVec d = exps_[k] - e.mean;
                e.cov += (a[k] / z) * d * d.transpose();
            }
        }
        return e;
    }

    SReal log_h(const SVec& x) const { return evaluate(x, false).log_value; }

private:
    int r_;
    std::vector<SVec> exps_;
    std::vector<SReal> logw_;
};

struct SaddleSolution {
    SVec delta;   // fundamental coordinates
    SVec s;       // simple-root coordinates of the minimizer
    SReal phi = 0;
    SReal residual = 0; // max-norm of grad log h(s) - delta
    SMat hessian;       // of phi^delta at s
    int iterations = 0;
};

struct SaddleOptions {
    SReal grad_tol = 1e-12L;
    int max_iterations = 500;
};

inline SVec to_svec(const std::vector<double>& v)
{
    SVec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

// <alpha_i, s> = (Cartan x)_i.
inline SVec chamber_coordinates(const SVec& x)
{
    const Eigen::Index r = x.size();
    SVec c(r);
    for (Eigen::Index i = 0; i < r; ++i)
        c(i) = 2 * x(i) - (i > 0 ? x(i - 1) : 0) - (i + 1 < r ? x(i + 1) : 0);
    return c;
}

inline void check_delta(const SVec& delta)
{
    for (Eigen::Index i = 0; i < delta.size(); ++i)
        if (delta(i) < 0) throw std::invalid_argument("solve_saddle: delta must lie in the closed positive chamber");
    if (delta.sum() >= 1) throw std::invalid_argument("solve_saddle: need <delta, highest coroot> < 1");
}

// Minimizes phi^delta(x) = log h(x) - delta . x by damped Newton from x = 0.
inline SaddleSolution solve_saddle(const SVec& delta, const WalkSpec& walk, const SaddleOptions& opt = {})
{
    const int r = walk.p.r;
    if (delta.size() != r) throw std::invalid_argument("solve_saddle: rank mismatch");
    check_delta(delta);
    const ExpSum hs(walk);
    SVec x = SVec::Zero(r);
    auto objective = [&](const SVec& y) { return hs.log_h(y) - delta.dot(y); };

    SaddleSolution sol;
    sol.delta = delta;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const auto e = hs.evaluate(x);
        const SVec grad = e.mean - delta;
        if (grad.lpNorm<Eigen::Infinity>() <= opt.grad_tol) break;
        const SVec dir = -e.cov.llt().solve(grad);
        const SReal f0 = e.log_value - delta.dot(x);
        const SReal slope = grad.dot(dir);
        SReal step = 1;
        // below rounding level the Armijo test cannot see the decrease; take the full step
        const bool tiny = -slope < 1e-14L * (1 + std::fabs(f0));
        while (!tiny && step > 1e-12L && objective(x + step * dir) > f0 + 1e-4L * step * slope) step /= 2;
        x += step * dir;
    }
    // reflect-average across walls where delta vanishes: the minimizer lies on them
    for (int i = 0; i < r; ++i) {
        if (delta(i) != 0) continue;
        const SReal c = chamber_coordinates(x)(i);
        x(i) -= c / 2; // (x + s_i x) / 2 with s_i x = x - <alpha_i, s> alpha_i
    }
    const auto e = hs.evaluate(x);
    sol.s = x;
    sol.phi = e.log_value - delta.dot(x);
    sol.residual = (e.mean - delta).lpNorm<Eigen::Infinity>();
    sol.hessian = e.cov;
    sol.iterations = it;
    return sol;
}

inline SaddleSolution solve_saddle(const SVec& delta, const RankParams& p, const SaddleOptions& opt = {})
{
    return solve_saddle(delta, WalkSpec::simple(p), opt);
}

inline SReal phi(const SVec& delta, const WalkSpec& walk) { return solve_saddle(delta, walk).phi; }

// Phi(delta) = phi(delta) + log(rho z).
inline SReal Phi(const SVec& delta, SReal z, const WalkSpec& walk)
{
    const SReal rz = static_cast<SReal>(rho(walk).to_long_double()) * z;
    if (!(rz > 0)) throw std::invalid_argument("Phi: z must be positive");
    return phi(delta, walk) + std::log(rz);
}

struct GDG {
    SVec g;  // grad log h at s, fundamental coordinates
    SMat dg; // its differential, acting on simple-root coordinates
};

inline GDG g_and_dg(const SVec& s, const WalkSpec& walk)
{
    const auto e = ExpSum(walk).evaluate(s);
    return {e.mean, e.cov};
}

struct GreenSaddle {
    SVec lambda_dir; // lambda / |lambda|_2 in fundamental coordinates
    SReal z = 0;
    SReal t0 = 0;
    SVec s0;         // simple-root coordinates
    SVec delta0;     // lambda / t0
    SReal h_residual = 0;    // |h(s0) rho z - 1|
    SReal direction_residual = 0; // max-norm of g(s0) - lambda / t0
};

// Psi(t) = t Phi(lambda / t); Psi'(t) = log h(s_t) + log(rho z).
inline SReal psi_prime(const Weight& lambda, SReal t, SReal z, const WalkSpec& walk)
{
    SVec d(lambda.rank());
    for (int i = 0; i < lambda.rank(); ++i) d(i) = lambda[i] / t;
    const auto sol = solve_saddle(d, walk);
    return ExpSum(walk).log_h(sol.s) + std::log(static_cast<SReal>(rho(walk).to_long_double()) * z);
}

// Psi''(t) = -lambda^T H^{-1} lambda / t^3 with H the Hessian at s_t.
inline SReal psi_second(const Weight& lambda, SReal t, const WalkSpec& walk)
{
    SVec l(lambda.rank());
    for (int i = 0; i < lambda.rank(); ++i) l(i) = lambda[i];
    const auto sol = solve_saddle(l / t, walk);
    return -l.dot(sol.hessian.llt().solve(l)) / (t * t * t);
}

inline GreenSaddle green_saddle(const Weight& lambda, SReal z, const WalkSpec& walk)
{
    if (!is_dominant(lambda) || length(lambda) == 0) throw std::invalid_argument("green_saddle: need dominant lambda != 0");
    const SReal rt = static_cast<SReal>(rho_tilde(walk).to_long_double());
    if (!(z > 0) || z * rt >= 1) throw std::invalid_argument("green_saddle: need 0 < z < 1/rho_tilde");
    const SReal len = length(lambda);
    SReal lo = len * (1 + 1e-9L), hi = 2 * len;
    while (psi_prime(lambda, hi, z, walk) > 0) {
        lo = hi;
        hi *= 2;
        if (hi > 1e12L * len) throw std::runtime_error("green_saddle: bracket search failed");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15L * hi; ++it) {
        const SReal mid = (lo + hi) / 2;
        if (psi_prime(lambda, mid, z, walk) > 0) lo = mid;
        else hi = mid;
    }
    GreenSaddle gs;
    gs.z = z;
    gs.t0 = (lo + hi) / 2;
    SVec l(lambda.rank());
    for (int i = 0; i < lambda.rank(); ++i) l(i) = lambda[i];
    gs.lambda_dir = l / l.norm();
    gs.delta0 = l / gs.t0;
    const auto sol = solve_saddle(gs.delta0, walk);
    gs.s0 = sol.s;
    const auto e = ExpSum(walk).evaluate(sol.s);
    gs.h_residual = std::fabs(std::exp(e.log_value) * static_cast<SReal>(rho(walk).to_long_double()) * z - 1);
    gs.direction_residual = (e.mean - gs.delta0).lpNorm<Eigen::Infinity>();
    return gs;
}

// q_delta(theta) = sum_{i=1}^{r+1} e^{<lambda_i - lambda_{i-1}, s>} <lambda_i - lambda_{i-1}, theta>^2,
// lambda_0 = lambda_{r+1} = 0, with s = s(delta); theta in simple-root coordinates.
inline SReal curvature_form_at(const SVec& s, const SVec& theta)
{
    const Eigen::Index r = s.size();
    SReal out = 0;
    for (Eigen::Index i = 0; i <= r; ++i) {
        const SReal ds = (i < r ? s(i) : 0) - (i > 0 ? s(i - 1) : 0);
        const SReal dt = (i < r ? theta(i) : 0) - (i > 0 ? theta(i - 1) : 0);
        out += std::exp(ds) * dt * dt;
    }
    return out;
}

inline SReal curvature_form(const SVec& delta, const SVec& theta, const WalkSpec& walk)
{
    return curvature_form_at(solve_saddle(delta, walk).s, theta);
}

} // namespace bwalk
