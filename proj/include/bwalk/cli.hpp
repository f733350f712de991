#pragma once

// building-walk command line. run_cli parses argv, writes results to out and
// diagnostics to err, and returns the process exit code.

#include "bwalk/config.hpp"
#include "bwalk/green.hpp"
#include "bwalk/identities.hpp"
#include "bwalk/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef BWALK_DEFAULT_CONFIG
#define BWALK_DEFAULT_CONFIG "config/default.cfg"
#endif

namespace bwalk {

enum ExitCode : int { kExitPass = 0, kExitEnvelope = 1, kExitInput = 2, kExitResource = 3 };

namespace cli {

struct Common {
    int rank = 0;
    long q = 2;
    std::vector<std::string> variant;
    std::string format;
    std::string config_path = BWALK_DEFAULT_CONFIG;

    WalkSpec walk() const
    {
        const RankParams p(rank, q);
        if (variant.empty()) return WalkSpec::simple(p);
        return WalkSpec::isotropic(p, parse_rational(variant[0]), parse_rational(variant[1]));
    }

    Config config() const { return Config::load(config_path); }

    static Rational parse_rational(const std::string& s)
    {
        Rational x;
        if (s.empty() || x.set_str(s, 10) != 0 || x.get_den() == 0) throw std::invalid_argument("not a rational number: " + s);
        x.canonicalize();
        return x;
    }
};

inline std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != tok.size()) throw std::invalid_argument("not an integer list: " + s);
        out.push_back(v);
    }
    return out;
}

inline Weight parse_weight(const std::string& s, int r)
{
    const auto m = parse_int_list(s);
    if (static_cast<int>(m.size()) != r) throw std::invalid_argument("weight " + s + " needs " + std::to_string(r) + " coordinates");
    Weight w(m);
    if (!is_dominant(w)) throw std::invalid_argument("weight " + s + " is not dominant");
    return w;
}

inline std::string fmt(long double x) { return detail::format_real(x); }

inline void emit_rows(std::ostream& out, const std::vector<ReportRow>& rows, int r, const std::string& format)
{
    if (format == "json") out << rows_to_json(rows).dump(2) << "\n";
    else write_csv(out, rows, r);
}

// Closed forms of rho_tilde for the simple walk.
inline std::optional<QuadraticScalar> rho_tilde_closed_form(int r, long q)
{
    const auto sq = QuadraticScalar::sqrt_q(q);
    switch (r) {
    case 1: return sq * make_rational(2, q + 1);
    case 2: return QuadraticScalar(q, make_rational(3 * q, q * q + q + 1));
    case 3: {
        const auto den = (QuadraticScalar(q, Rational(q * q + q + 1)) + sq * Rational(2 * (q + 1))) * Rational(1 + q * q);
        return den.inverse() * Rational(14 * q * q);
    }
    default: return std::nullopt;
    }
}

inline std::vector<std::vector<Rational>> default_directions(int r)
{
    const Rational a = make_rational(1, 4), b = make_rational(1, 2), c = make_rational(1, 6), z = 0;
    switch (r) {
    case 1: return {{a}, {b}};
    case 2: return {{a, a}, {b, z}, {a, b}};
    case 3: return {{c, z, z}, {z, c, z}, {c, z, c}};
    default: return {};
    }
}

struct RatioArgs {
    std::string regime;
    std::optional<int> n, n_min, n_max;
    std::optional<double> z, envelope;
    std::optional<std::string> z_frac;
    std::vector<std::string> rays;
    int length_min = 4;
    std::optional<int> length_max;
    int d_max = 3;
};

inline std::vector<int> n_range(const RatioArgs& a, int default_min)
{
    if (a.n) {
        if (a.n_min || a.n_max) throw std::invalid_argument("use either --n or --n-min/--n-max");
        return {*a.n};
    }
    if (!a.n_max) throw std::invalid_argument("ratio: --n or --n-max is required for this regime");
    const int lo = a.n_min.value_or(default_min);
    if (lo < 0 || lo > *a.n_max) throw std::invalid_argument("ratio: empty n range");
    std::vector<int> ns;
    for (int n = lo; n <= *a.n_max; ++n) ns.push_back(n);
    return ns;
}

inline Rational z_fraction(const RatioArgs& a, const WalkSpec& walk, const Rational& fallback)
{
    if (a.z && a.z_frac) throw std::invalid_argument("use either --z or --z-frac");
    if (a.z_frac) return Common::parse_rational(*a.z_frac);
    if (a.z) return Rational(static_cast<double>(*a.z * rho_tilde(walk).to_long_double()));
    return fallback;
}

inline int cmd_kernel(const Common& c, int n, std::ostream& out)
{
    const auto walk = c.walk();
    if (n < 0) throw std::invalid_argument("kernel: n must be >= 0");
    emit_rows(out, kernel_rows(kernel_table(walk, n)), walk.p.r, c.format);
    return kExitPass;
}

inline int cmd_ratio(const Common& c, const RatioArgs& a, std::ostream& out, std::ostream& err)
{
    const auto walk = c.walk();
    const int r = walk.p.r;
    const Config cfg = c.config();
    // without --regime: green when a z is given, interior otherwise
    const std::string regime = !a.regime.empty() ? a.regime : (a.z || a.z_frac) ? "green" : "interior";
    RatioReport rep;
    if (regime == "interior") {
        InteriorOptions o;
        o.ns = n_range(a, 1);
        o.k_cfg = r >= 3 ? cfg.get_int("interior.k_cfg") : 1;
        const std::string key = walk.variant == Variant::isotropic2 ? "envelope.isotropic" : "envelope.interior.r" + std::to_string(r);
        o.envelope = a.envelope ? *a.envelope : cfg.get_double(key);
        o.directions = default_directions(r);
        for (int n1 : o.ns)
            if (std::find(o.ns.begin(), o.ns.end(), 2 * n1) != o.ns.end()) o.doubling.emplace_back(n1, 2 * n1);
        o.skip_unavailable_drift = true;
        rep = interior_report(walk, o);
    } else if (regime == "boundary") {
        BoundaryOptions o;
        o.ns = n_range(a, 1);
        o.d_max = a.d_max;
        o.k_prime = cfg.get_int("boundary.k_prime");
        o.envelope = a.envelope ? *a.envelope : cfg.get_double("envelope.boundary");
        rep = boundary_report(walk, o);
    } else if (regime == "green" || regime == "green_critical") {
        if (a.n || a.n_min || a.n_max) throw std::invalid_argument("ratio: green regimes take --z/--z-frac, not n");
        const bool critical = regime == "green_critical";
        GreenReportOptions o;
        if (critical) {
            if (a.z || a.z_frac) throw std::invalid_argument("ratio: green_critical fixes z = 1 / rho_tilde");
            o.fraction = 1;
        } else {
            o.fraction = z_fraction(a, walk, make_rational(1, 2));
            if (o.fraction >= 1) throw std::invalid_argument("ratio: subcritical green needs z < 1 / rho_tilde");
        }
        if (a.rays.empty()) {
            if (r == 1) o.rays = {Weight{1}};
            else if (r == 2) o.rays = {Weight{1, 0}, Weight{1, 1}};
            else throw std::invalid_argument("ratio: give --ray for rank " + std::to_string(r));
        } else {
            for (const auto& s : a.rays) o.rays.push_back(parse_weight(s, r));
        }
        o.length_min = a.length_min;
        o.length_max = a.length_max.value_or(critical ? 16 : 24);
        o.green.critical_terms = cfg.get_int("green.critical_terms");
        const std::string key = critical ? "envelope.green_critical" : "envelope.green.r" + std::to_string(r);
        o.envelope = a.envelope ? *a.envelope : cfg.get_double(key);
        rep = green_report(walk, o);
    } else {
        throw std::invalid_argument("ratio: unknown regime " + regime);
    }

    if (c.format == "text") {
        write_summary(out, rep);
    } else {
        emit_rows(out, rep.rows, r, c.format);
        write_summary(err, rep);
    }
    return rep.envelope_passed ? kExitPass : kExitEnvelope;
}

inline int cmd_identities(const Common& c, int n_max, std::ostream& out)
{
    const auto rep = identity_suite(RankParams(c.rank, c.q), n_max);
    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& k : rep.checks) arr.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
        out << arr.dump(2) << "\n";
    } else {
        for (const auto& k : rep.checks)
            out << (k.passed ? "PASS " : "FAIL ") << k.name << (k.detail.empty() ? "" : ": " + k.detail) << "\n";
    }
    return rep.all_passed() ? kExitPass : kExitEnvelope;
}

inline int cmd_saddle(const Common& c, const std::optional<std::string>& delta_arg, std::ostream& out)
{
    const auto walk = c.walk();
    const int r = walk.p.r;
    SVec d = SVec::Zero(r);
    if (delta_arg) {
        std::vector<long double> v;
        std::stringstream ss(*delta_arg);
        for (std::string tok; std::getline(ss, tok, ',');) v.push_back(detail::parse_real(tok));
        if (static_cast<int>(v.size()) != r) throw std::invalid_argument("saddle: --delta needs " + std::to_string(r) + " coordinates");
        for (int i = 0; i < r; ++i) d(i) = v[static_cast<std::size_t>(i)];
    }
    const auto sol = solve_saddle(d, walk);
    const SVec ch = chamber_coordinates(sol.s);
    Eigen::SelfAdjointEigenSolver<SMat> es(sol.hessian);
    auto vec = [](const SVec& v) {
        std::vector<std::string> o;
        for (Eigen::Index i = 0; i < v.size(); ++i) o.push_back(fmt(v(i)));
        return o;
    };
    if (c.format == "json") {
        nlohmann::json j{{"delta", vec(sol.delta)}, {"s_root_coordinates", vec(sol.s)}, {"s_chamber", vec(ch)},
                         {"phi", fmt(sol.phi)}, {"residual", fmt(sol.residual)}, {"iterations", sol.iterations},
                         {"hessian_min_eigenvalue", fmt(es.eigenvalues().minCoeff())}};
        out << j.dump(2) << "\n";
    } else {
        auto line = [&](const char* name, const std::vector<std::string>& v) {
            out << name << ":";
            for (const auto& x : v) out << " " << x;
            out << "\n";
        };
        line("delta", vec(sol.delta));
        line("s (simple-root coordinates)", vec(sol.s));
        line("<alpha_i, s>", vec(ch));
        out << "phi: " << fmt(sol.phi) << "\nresidual: " << fmt(sol.residual) << "\niterations: " << sol.iterations
            << "\nhessian min eigenvalue: " << fmt(es.eigenvalues().minCoeff()) << "\n";
    }
    return kExitPass;
}

inline int cmd_spectral(const Common& c, std::ostream& out)
{
    const auto walk = c.walk();
    const auto rh = rho(walk), rt = rho_tilde(walk);
    std::optional<bool> matches;
    if (walk.is_symmetric())
        if (const auto cf = rho_tilde_closed_form(walk.p.r, walk.p.q)) matches = (*cf == rt);
    if (c.format == "json") {
        nlohmann::json j{{"rank", walk.p.r}, {"q", walk.p.q}, {"rho", rh.to_string()}, {"rho_float", fmt(rh.to_long_double())},
                         {"rho_tilde", rt.to_string()}, {"rho_tilde_float", fmt(rt.to_long_double())}};
        j["closed_form_match"] = matches ? nlohmann::json(*matches) : nlohmann::json(nullptr);
        out << j.dump(2) << "\n";
    } else {
        out << "rho = " << rh.to_string() << " = " << fmt(rh.to_long_double()) << "\n";
        out << "rho_tilde = " << rt.to_string() << " = " << fmt(rt.to_long_double()) << "\n";
        if (matches) out << "closed form: " << (*matches ? "match" : "MISMATCH") << "\n";
        else out << "closed form: not available for this rank or variant\n";
    }
    return matches.value_or(true) ? kExitPass : kExitEnvelope;
}

struct GreenArgs {
    std::optional<double> z;
    std::optional<std::string> z_frac;
    std::vector<std::string> lambdas;
    std::optional<int> length_max;
};

// One row per target; n is the last series index summed, exact columns are empty.
inline int cmd_green(const Common& c, const GreenArgs& a, std::ostream& out, std::ostream& err)
{
    const auto walk = c.walk();
    const int r = walk.p.r;
    std::vector<Weight> targets;
    for (const auto& s : a.lambdas) targets.push_back(parse_weight(s, r));
    if (a.length_max) {
        if (*a.length_max < 0) throw std::invalid_argument("green: --length-max must be >= 0");
        for (const auto& l : dominant_weights(r, *a.length_max)) targets.push_back(l);
    }
    if (targets.empty()) throw std::invalid_argument("green: give --lambda or --length-max");

    GreenOptions opt;
    GreenBatch batch;
    if (a.z && a.z_frac) throw std::invalid_argument("use either --z or --z-frac");
    const bool critical_requested = a.z_frac && Common::parse_rational(*a.z_frac) == 1;
    if (critical_requested) opt.critical_terms = c.config().get_int("green.critical_terms");
    if (a.z) batch = green_exact(walk, targets, static_cast<SReal>(*a.z), opt);
    else batch = green_exact_fraction(walk, targets, a.z_frac ? Common::parse_rational(*a.z_frac) : make_rational(1, 2), opt);

    const Estimates est(walk);
    std::vector<ReportRow> rows;
    for (const auto& res : batch.results) {
        ReportRow row;
        row.n = res.terms;
        row.lambda = res.lambda;
        row.exact_float = res.value;
        if (length(res.lambda) > 0) {
            const auto e = batch.regime == GreenRegime::critical ? est.green_critical(res.lambda) : est.green(res.lambda, batch.z);
            row.shape = e.value();
            row.ratio = std::exp(std::log(res.value) - e.log_value);
        }
        rows.push_back(std::move(row));
    }
    sort_rows(rows);
    emit_rows(out, rows, r, c.format == "text" ? "csv" : c.format);
    err << "z = " << fmt(batch.z) << " (" << (batch.regime == GreenRegime::critical ? "critical" : "subcritical") << "); "
        << batch.truncation_note << "\n";
    return kExitPass;
}

} // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact transition densities, Green functions and shape estimates for the simple random walk on affine buildings of type A_r"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    cli::Common c;
    std::map<const CLI::App*, std::string> default_format;
    auto common = [&](CLI::App* s, const std::string& fallback, std::vector<std::string> formats) {
        default_format[s] = fallback;
        s->add_option("--rank", c.rank, "rank r >= 1")->required()->check(CLI::PositiveNumber);
        s->add_option("--q", c.q, "thickness q >= 2")->capture_default_str();
        s->add_option("--variant", c.variant, "isotropic rank 2 walk with step probabilities P1 P2 (rationals)")->expected(2);
        s->add_option("--format", c.format, "output format: " + CLI::detail::join(formats, "|") + " (default " + fallback + ")")
            ->check(CLI::IsMember(formats));
        s->add_option("--config", c.config_path, "config file")->capture_default_str();
    };

    int kernel_n = 0;
    auto* kernel = app.add_subcommand("kernel", "exact p^n(0, x_lambda) for every dominant lambda");
    common(kernel, "csv", {"csv", "json"});
    kernel->add_option("--n", kernel_n, "number of steps")->required();

    cli::RatioArgs ra;
    auto* ratio = app.add_subcommand("ratio", "exact / shape ratios over a grid, checked against an envelope");
    common(ratio, "text", {"text", "csv", "json"});
    ratio->add_option("--regime", ra.regime, "interior | boundary | green | green_critical (default interior, or green with --z/--z-frac)")
        ->check(CLI::IsMember({"interior", "boundary", "green", "green_critical"}));
    ratio->add_option("--n", ra.n, "single n");
    ratio->add_option("--n-min", ra.n_min, "first n of the range (default 1)");
    ratio->add_option("--n-max", ra.n_max, "last n of the range");
    ratio->add_option("--z", ra.z, "Green parameter z");
    ratio->add_option("--z-frac", ra.z_frac, "Green parameter as a fraction of 1 / rho_tilde, e.g. 9/10 (default 1/2)");
    ratio->add_option("--envelope", ra.envelope, "spread envelope (default from config)");
    ratio->add_option("--ray", ra.rays, "Green ray as comma separated fundamental coordinates, repeatable");
    ratio->add_option("--length-min", ra.length_min, "shortest Green target length")->capture_default_str();
    ratio->add_option("--length-max", ra.length_max, "longest Green target length (default 24, critical 16)");
    ratio->add_option("--d-max", ra.d_max, "boundary: largest n - length(lambda)")->capture_default_str();

    int id_n_max = 6;
    auto* identities = app.add_subcommand("identities", "exact Laurent polynomial identities");
    common(identities, "text", {"text", "json"});
    identities->add_option("--n-max", id_n_max, "largest n for the n-dependent identities")->capture_default_str();

    std::optional<std::string> delta;
    auto* saddle = app.add_subcommand("saddle", "solve the saddle-point problem at delta");
    common(saddle, "text", {"text", "json"});
    saddle->add_option("--delta", delta, "fundamental coordinates of delta, comma separated (default 0)");

    auto* spectral = app.add_subcommand("spectral", "spectral radii rho and rho_tilde");
    common(spectral, "text", {"text", "json"});

    cli::GreenArgs ga;
    auto* green = app.add_subcommand("green", "Green function G(0, x_lambda; z) with shape and ratio");
    common(green, "csv", {"csv", "json"});
    green->add_option("--z", ga.z, "Green parameter z");
    green->add_option("--z-frac", ga.z_frac, "z as a fraction of 1 / rho_tilde (default 1/2; 1 is critical)");
    green->add_option("--lambda", ga.lambdas, "target weight, comma separated, repeatable");
    green->add_option("--length-max", ga.length_max, "all dominant targets up to this length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitInput;
    }
    if (c.format.empty()) c.format = default_format.at(app.get_subcommands().front());

    try {
        if (kernel->parsed()) return cli::cmd_kernel(c, kernel_n, out);
        if (ratio->parsed()) return cli::cmd_ratio(c, ra, out, err);
        if (identities->parsed()) return cli::cmd_identities(c, id_n_max, out);
        if (saddle->parsed()) return cli::cmd_saddle(c, delta, out);
        if (spectral->parsed()) return cli::cmd_spectral(c, out);
        if (green->parsed()) return cli::cmd_green(c, ga, out, err);
    } catch (const ResourceLimitError& e) {
        err << "resource ceiling: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

} // namespace bwalk
