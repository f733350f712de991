// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [config] [id,id,...]. Envelopes come from the config file
// (default config/default.cfg); every other tolerance is fixed below.

#include "bwalk/config.hpp"
#include "bwalk/green.hpp"
#include "bwalk/identities.hpp"
#include "bwalk/report.hpp"
#include "bwalk/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef BWALK_DEFAULT_CONFIG
#define BWALK_DEFAULT_CONFIG "config/default.cfg"
#endif

using namespace bwalk;

namespace {

constexpr long double kIdentityTol = 1e-12L;
constexpr long double kSaddleResidual = 1e-10L;
constexpr long double kArtanhTol = 1e-10L;
constexpr long double kFiniteDiffTol = 1e-6L;
constexpr double kMaxDrift = 1.0;
constexpr double kSlopeRelTol = 0.05;
constexpr double kGreenRelTol = 1e-12;
constexpr double kCauchyTol = 0.02;
constexpr int kCauchyKMin = 20;
constexpr int kCauchyKMax = 40;
constexpr long double kQuadratureRelTol = 1e-8L;

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            passed = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// 1. sum_lambda N_lambda p^n(0, x_lambda) = 1 exactly
void mass_conservation(Outcome& o)
{
    struct Case { int r; long q; int n_max; };
    int checked = 0;
    for (const auto& c : {Case{1, 2, 60}, Case{1, 3, 60}, Case{2, 2, 24}, Case{2, 3, 24}, Case{3, 2, 12}}) {
        const auto w = WalkSpec::simple(RankParams(c.r, c.q));
        for (int n = 0; n <= c.n_max; ++n) {
            const auto m = mass_identity(w, n);
            o.require(m.exact, "r=" + std::to_string(c.r) + " q=" + std::to_string(c.q) + " n=" + std::to_string(n));
            ++checked;
        }
    }
    o.detail << checked << " (r,q,n) cases";
}

// 2. rank 1 kernel equals the tree oracle
void tree_equivalence(Outcome& o)
{
    int checked = 0;
    for (long q : {2L, 3L, 4L}) {
        const auto w = WalkSpec::simple(RankParams(1, q));
        for (int n = 0; n <= 40; ++n) {
            const auto t = kernel_table(w, n);
            for (int k = 0; k <= n; ++k) {
                const bool ok = t.value(Weight{k}) == QuadraticScalar(q, pn_tree_oracle(q, n, k));
                o.require(ok, "q=" + std::to_string(q) + " n=" + std::to_string(n) + " k=" + std::to_string(k));
                ++checked;
            }
        }
    }
    o.detail << checked << " values";
}

// 3. p^2(0,0) closed forms
void spot_values(Outcome& o)
{
    for (long q : {2L, 3L, 4L}) {
        o.require(pn_exact(WalkSpec::simple(RankParams(1, q)), 2, Weight{0}) == QuadraticScalar(q, make_rational(1, q + 1)),
                  "rank 1 q=" + std::to_string(q));
        o.require(pn_exact(WalkSpec::simple(RankParams(2, q)), 2, Weight{0, 0}) ==
                      QuadraticScalar(q, make_rational(1, 2 * (q * q + q + 1))),
                  "rank 2 q=" + std::to_string(q));
    }
    o.detail << "q in {2,3,4}, ranks 1 and 2";
}

// 4. spectral radii against closed forms
void spectral_radii(Outcome& o)
{
    for (long q : {2L, 3L, 4L}) {
        const auto sq = QuadraticScalar::sqrt_q(q);
        const auto r1 = sq * make_rational(2, q + 1);
        const auto r2 = QuadraticScalar(q, make_rational(3 * q, q * q + q + 1));
        const auto den = (QuadraticScalar(q, Rational(q * q + q + 1)) + sq * Rational(2 * (q + 1))) * Rational(1 + q * q);
        const auto r3 = den.inverse() * Rational(14 * q * q);
        o.require(rho_tilde(WalkSpec::simple(RankParams(1, q))) == r1, "rank 1 q=" + std::to_string(q));
        o.require(rho_tilde(WalkSpec::simple(RankParams(2, q))) == r2, "rank 2 q=" + std::to_string(q));
        o.require(rho_tilde(WalkSpec::simple(RankParams(3, q))) == r3, "rank 3 q=" + std::to_string(q));
    }
    o.detail << "ranks 1-3, q in {2,3,4}, exact equality";
}

SpectralPoint random_point(int r, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> th(-3.0, 3.0), s(-0.7, 0.7);
    RVec theta(static_cast<std::size_t>(r + 1)), shift(static_cast<std::size_t>(r + 1));
    for (std::size_t j = 0; j <= static_cast<std::size_t>(r); ++j) {
        theta[j] = th(rng);
        shift[j] = s(rng);
    }
    return SpectralPoint::from_parts(theta, shift);
}

// 5. algebraic identities and spectral forms
void identity_suite_check(Outcome& o)
{
    for (int r = 1; r <= 4; ++r) {
        const RankParams p(r, 2);
        const auto c = check_h_plus_two_product(p);
        o.require(c.passed, "h + 2 product, rank " + std::to_string(r));
    }
    const RankParams p2(2, 2);
    const RationalLaurent h = h_poly(p2);
    for (int n = 0; n <= 6; ++n) o.require(check_rank2_orbit_identity(n, h).passed, "rank 2 orbit identity n=" + std::to_string(n));

    std::mt19937_64 rng(20240601);
    long double worst_c = 0, worst_p = 0;
    for (int r = 1; r <= 3; ++r) {
        const RankParams p(r, 2);
        for (int i = 0; i < 100; ++i) {
            const auto pt = random_point(r, rng);
            const auto cbd = c_b_delta(pt, p);
            const Complex lhs = Real(1) / cbd.c;
            const Complex rhs = cbd.delta * cbd.b * std::exp(-weight_pairing(rho_P(r), pt.z));
            worst_c = std::max(worst_c, std::abs(lhs - rhs) / std::abs(lhs));
        }
        for (int i = 0; i < 25; ++i) {
            const auto pt = random_point(r, rng);
            for (int k = 1; k <= r; ++k) {
                const Complex a = macdonald_P(Weight::fundamental(r, k), pt, p);
                const Complex b = macdonald_P_fundamental(k, pt, p);
                worst_p = std::max(worst_p, std::abs(a - b) / std::abs(b));
            }
        }
    }
    o.require(worst_c <= kIdentityTol, "1/c factorization");
    o.require(worst_p <= kIdentityTol, "symmetrized sum vs orbit form");
    o.detail << "h+2 product r<=4, rank 2 orbit identity n<=6, 1/c max rel err " << static_cast<double>(worst_c)
             << ", fundamental P max rel err " << static_cast<double>(worst_p);
}

// 6. saddle solver
void saddle_correctness(Outcome& o)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    long double worst_res = 0, worst_fd = 0;
    bool pd = true, dg_pos = true;
    for (int r = 1; r <= 3; ++r) {
        const auto w = WalkSpec::simple(RankParams(r, 2));
        for (int i = 0; i < 100; ++i) {
            SVec d(r);
            for (int j = 0; j < r; ++j) d(j) = u01(rng);
            d *= 0.999L * u01(rng) / d.sum();
            const auto sol = solve_saddle(d, w);
            worst_res = std::max(worst_res, sol.residual);
            Eigen::SelfAdjointEigenSolver<SMat> es(sol.hessian);
            pd = pd && es.eigenvalues().minCoeff() > 0;
            if (i % 10 == 0) {
                // central differences of Phi against -s
                const long double hstep = 1e-5L, z = 0.5L / rho_tilde(w).to_long_double();
                for (int j = 0; j < r; ++j) {
                    SVec e = SVec::Zero(r);
                    e(j) = hstep;
                    if (d(j) < hstep || (d + e).sum() >= 1) continue;
                    const long double fd = (Phi(d + e, z, w) - Phi(d - e, z, w)) / (2 * hstep);
                    worst_fd = std::max(worst_fd, std::fabs(fd + sol.s(j)));
                }
            }
            SVec s(r), v(r);
            for (int j = 0; j < r; ++j) {
                s(j) = 4 * u01(rng) - 2;
                v(j) = 2 * u01(rng) - 1;
            }
            const auto gd = g_and_dg(s, w);
            dg_pos = dg_pos && v.dot(gd.dg * v) > 0;
        }
    }
    long double worst_artanh = 0;
    const auto w1 = WalkSpec::simple(RankParams(1, 2));
    for (long double d : {0.1L, 0.3L, 0.6L, 0.9L, 0.99L}) {
        SVec dv(1);
        dv(0) = d;
        worst_artanh = std::max(worst_artanh, std::fabs(solve_saddle(dv, w1).s(0) - std::atanh(d)));
    }
    o.require(worst_res <= kSaddleResidual, "residual");
    o.require(worst_artanh <= kArtanhTol, "rank 1 closed form");
    o.require(pd, "Hessian positive definite");
    o.require(worst_fd <= kFiniteDiffTol, "grad Phi = -s");
    o.require(dg_pos, "<u, dg u> > 0");
    o.detail << "max residual " << static_cast<double>(worst_res) << ", artanh err " << static_cast<double>(worst_artanh)
             << ", finite-difference err " << static_cast<double>(worst_fd);
}

std::vector<int> range(int a, int b)
{
    std::vector<int> v;
    for (int i = a; i <= b; ++i) v.push_back(i);
    return v;
}

void describe(Outcome& o, const std::string& tag, const RatioReport& rep)
{
    o.detail << tag << ": " << rep.rows.size() << " pts, spread " << static_cast<double>(rep.spread) << " (env " << rep.envelope
             << ")";
    long double drift = 0;
    for (const auto& d : rep.drift) drift = std::max(drift, std::fabs(d.log_change));
    if (!rep.drift.empty()) o.detail << ", max |drift| " << static_cast<double>(drift);
    for (const auto& s : rep.slopes) o.detail << ", slope " << s.ray << " rel err " << static_cast<double>(s.rel_error);
    o.detail << "; ";
    o.require(rep.envelope_passed, tag + " envelope");
    for (const auto& d : rep.drift)
        o.require(d.passed, tag + " drift " + d.direction + " " + std::to_string(d.n1) + "->" + std::to_string(d.n2));
    for (const auto& s : rep.slopes) o.require(s.passed, tag + " slope " + s.ray);
}

// 7. interior envelope
void interior_envelope(Outcome& o, const Config& cfg)
{
    InteriorOptions o2;
    o2.ns = {16, 20, 24, 32, 40};
    o2.envelope = cfg.get_double("envelope.interior.r2");
    o2.max_drift = kMaxDrift;
    o2.directions = {{make_rational(1, 4), make_rational(1, 4)}, {make_rational(1, 2), Rational(0)}, {make_rational(1, 4), make_rational(1, 2)}};
    o2.doubling = {{16, 32}, {20, 40}};
    describe(o, "rank 2", interior_report(WalkSpec::simple(RankParams(2, 2)), o2));

    InteriorOptions o3;
    o3.ns = range(4, 12);
    o3.k_cfg = cfg.get_int("interior.k_cfg");
    o3.envelope = cfg.get_double("envelope.interior.r3");
    o3.max_drift = kMaxDrift;
    o3.directions = {{make_rational(1, 6), Rational(0), Rational(0)},
                     {Rational(0), make_rational(1, 6), Rational(0)},
                     {make_rational(1, 6), Rational(0), make_rational(1, 6)}};
    o3.doubling = {{6, 12}};
    describe(o, "rank 3", interior_report(WalkSpec::simple(RankParams(3, 2)), o3));
}

// 8. boundary envelope
void boundary_envelope(Outcome& o, const Config& cfg)
{
    BoundaryOptions b;
    b.ns = range(4, 40);
    b.d_max = 3;
    b.k_prime = cfg.get_int("boundary.k_prime");
    b.envelope = cfg.get_double("envelope.boundary");
    const auto rep = boundary_report(WalkSpec::simple(RankParams(2, 2)), b);
    describe(o, "boundary", rep);
    std::size_t variant = 0;
    const Estimates est(rep.walk);
    for (const auto& row : rep.rows) variant += est.boundary_rank2(row.n, row.lambda, b.k_prime).corner_form ? 1 : 0;
    o.require(variant > 0, "corner form exercised");
    o.detail << variant << " points use the corner form";
}

// 9. subcritical Green function
void green_subcritical(Outcome& o, const Config& cfg)
{
    for (int r : {1, 2}) {
        const auto w = WalkSpec::simple(RankParams(r, 2));
        for (const Rational& f : {make_rational(1, 2), make_rational(9, 10)}) {
            GreenReportOptions g;
            g.fraction = f;
            g.rays = r == 1 ? std::vector<Weight>{Weight{1}} : std::vector<Weight>{Weight{1, 0}, Weight{1, 1}};
            g.length_min = 4;
            g.length_max = 24;
            g.envelope = cfg.get_double("envelope.green.r" + std::to_string(r));
            g.slope_rel_tol = kSlopeRelTol;
            g.green.rel_tol = kGreenRelTol;
            const auto rep = green_report(w, g);
            describe(o, "r=" + std::to_string(r) + " z=" + f.get_str() + "/rho~", rep);
            for (const auto& note : rep.notes) o.require(note.rfind("uncertified", 0) != 0, note);
        }
    }
}

// 10. critical Green function
void green_critical_check(Outcome& o, const Config& cfg)
{
    GreenReportOptions g;
    g.fraction = 1;
    g.rays = {Weight{1, 0}, Weight{1, 1}};
    g.length_min = 4;
    g.length_max = 16;
    g.envelope = cfg.get_double("envelope.green_critical");
    g.green.critical_terms = cfg.get_int("green.critical_terms");
    const auto rep = green_report(WalkSpec::simple(RankParams(2, 2)), g);
    describe(o, "critical", rep);
    o.detail << rep.notes.front();
}

// 11. F_0 growth
void f0_growth(Outcome& o, const Config& cfg)
{
    const double lo = cfg.get_double("f0.bracket_low"), hi = cfg.get_double("f0.bracket_high");
    for (int r = 1; r <= 3; ++r) {
        const RankParams p(r, 2);
        F0Evaluator f(p);
        double vmin = 1e300, vmax = 0;
        for (const auto& l : dominant_weights(r, 40)) {
            Rational prod = 1;
            for (const auto& al : positive_root_list(r)) prod *= 1 + pairing(al, l);
            const double v = Rational(f.reduced(l) / prod).get_d();
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        o.require(vmin >= lo && vmax <= hi, "bracket rank " + std::to_string(r));
        double worst = 0;
        int worst_k = 0;
        Rational prev;
        for (int k = kCauchyKMin; k <= kCauchyKMax; ++k) {
            const Weight l(std::vector<int>(static_cast<std::size_t>(r), k));
            const Rational v = f.reduced(l) / Rational(pi(l));
            if (k > kCauchyKMin) {
                const double change = std::fabs(Rational(v / prev).get_d() - 1);
                if (change > worst) {
                    worst = change;
                    worst_k = k - 1;
                }
            }
            prev = v;
        }
        o.require(worst <= kCauchyTol, "successive change rank " + std::to_string(r));
        o.detail << "r=" << r << ": range [" << vmin << ", " << vmax << "], max step change " << 100 * worst << "% at k=" << worst_k
                 << "; ";
    }
}

// 12. numeric inversion integral
void quadrature_check(Outcome& o)
{
    long double worst = 0;
    int count = 0;
    auto run = [&](int r, int n_max) {
        const auto w = WalkSpec::simple(RankParams(r, 2));
        for (int n = 0; n <= n_max; ++n) {
            const auto t = kernel_table(w, n);
            for (const auto& [l, v] : t.entries) {
                const long double num = quadrature_pn(w, n, l).value;
                const long double ex = v.to_long_double();
                const long double err = ex == 0 ? std::fabs(num) : std::fabs(num / ex - 1);
                worst = std::max(worst, err);
                ++count;
            }
        }
    };
    run(2, 10);
    run(1, 20);
    o.require(worst <= kQuadratureRelTol, "relative error");
    o.detail << count << " values, max relative error " << static_cast<double>(worst);
}

// 13. isotropic rank 2 variant
void isotropic_variant(Outcome& o, const Config& cfg)
{
    const RankParams p(2, 2);
    const auto simple = WalkSpec::simple(p);
    const auto same = WalkSpec::isotropic(p, step_probability(simple, 1).rational_part(), step_probability(simple, 2).rational_part());
    o.require(rho(same) == rho(simple) && rho_tilde(same) == rho_tilde(simple), "spectral radius");
    for (int n = 0; n <= 16; ++n) o.require(kernel_table(same, n).entries == kernel_table(simple, n).entries, "kernel n=" + std::to_string(n));
    const Estimates es(simple), ei(same);
    bool shapes = true;
    for (const auto& l : dominant_weights(2, 15)) {
        shapes = shapes && es.heat(16, l).log_value == ei.heat(16, l).log_value;
        if (length(l) > 0) shapes = shapes && es.green(l, 0.5L / rho_tilde(simple).to_long_double()).log_value ==
                                                  ei.green(l, 0.5L / rho_tilde(same).to_long_double()).log_value;
    }
    o.require(shapes, "shapes identical");
    const std::vector<Weight> targets{Weight{4, 0}, Weight{3, 3}};
    const auto gs = green_exact_fraction(simple, targets, make_rational(1, 2));
    const auto gi = green_exact_fraction(same, targets, make_rational(1, 2));
    for (std::size_t i = 0; i < targets.size(); ++i) o.require(gs.results[i].value == gi.results[i].value, "green identical");

    const auto aniso = WalkSpec::isotropic(p, make_rational(1, 21), make_rational(2, 21));
    for (int n = 0; n <= 24; ++n) o.require(mass_identity(aniso, n).exact, "mass n=" + std::to_string(n));
    InteriorOptions oi;
    oi.ns = range(4, 24);
    oi.envelope = cfg.get_double("envelope.isotropic");
    oi.harnack = false;
    describe(o, "p=(1/21,2/21)", interior_report(aniso, oi));
}

} // namespace

int main(int argc, char** argv)
{
    const std::string path = argc > 1 ? argv[1] : BWALK_DEFAULT_CONFIG;
    Config cfg;
    try {
        cfg = Config::load(path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }

    struct Criterion {
        int id;
        const char* title;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact mass conservation", mass_conservation},
        {2, "rank 1 kernel equals tree oracle", tree_equivalence},
        {3, "closed-form p^2(0,0)", spot_values},
        {4, "spectral radius closed forms", spectral_radii},
        {5, "identity suite", identity_suite_check},
        {6, "saddle correctness", saddle_correctness},
        {7, "interior heat kernel envelope", [&](Outcome& o) { interior_envelope(o, cfg); }},
        {8, "boundary heat kernel envelope", [&](Outcome& o) { boundary_envelope(o, cfg); }},
        {9, "subcritical Green function", [&](Outcome& o) { green_subcritical(o, cfg); }},
        {10, "critical Green function", [&](Outcome& o) { green_critical_check(o, cfg); }},
        {11, "F_0 growth and convergence", [&](Outcome& o) { f0_growth(o, cfg); }},
        {12, "quadrature cross-check", quadrature_check},
        {13, "isotropic rank 2 variant", [&](Outcome& o) { isotropic_variant(o, cfg); }},
    };

    std::vector<int> only;
    if (argc > 2) {
        std::stringstream ss(argv[2]);
        for (std::string tok; std::getline(ss, tok, ',');) only.push_back(std::stoi(tok));
    }
    int failed = 0, run = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        ++run;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.passed) ++failed;
        std::printf("criterion %2d %s  %s (%.1fs): %s\n", c.id, o.passed ? "PASS" : "FAIL", c.title, secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", run - failed, run);
    return failed == 0 ? 0 : 1;
}
