#pragma once

// Ratio harness (exact value / estimate shape over admissible grids) and the
// row-oriented CSV / JSON formats shared by every table the tool emits.

#include "bwalk/estimates.hpp"
#include "bwalk/exact_kernel.hpp"
#include "bwalk/green.hpp"
#include "bwalk/radial.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwalk {

// One (n, lambda) record. exact is absent for non-exact quantities (Green sums).
struct ReportRow {
    int n = 0;
    Weight lambda;
    std::optional<QuadraticScalar> exact;
    long double exact_float = 0;
    std::optional<long double> shape;
    std::optional<long double> ratio;
};

inline bool operator==(const ReportRow& a, const ReportRow& b)
{
    return a.n == b.n && a.lambda == b.lambda && a.exact == b.exact && a.exact_float == b.exact_float &&
           a.shape == b.shape && a.ratio == b.ratio;
}

inline void sort_rows(std::vector<ReportRow>& rows)
{
    std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return a.n != b.n ? a.n < b.n : a.lambda < b.lambda;
    });
}

struct DriftCheck {
    std::string direction;
    int n1 = 0, n2 = 0;
    Weight lambda1, lambda2;
    long double log_change = 0; // log ratio(n2) - log ratio(n1)
    bool passed = false;
};

struct SlopeCheck {
    std::string ray;
    long double fitted = 0;   // least-squares slope of log(G |lambda|^m / F_0) against |lambda|
    long double expected = 0; // -<lambda / |lambda|, s_0>
    long double rel_error = 0;
    bool passed = false;
};

struct HarnackEntry {
    int n = 0;
    long double sup = 0; // sup over neighbours y ~ x of p^n(0, y) / p^{n+1}(0, x)
};

struct RatioReport {
    std::string regime;
    std::string grid;
    WalkSpec walk;
    std::vector<ReportRow> rows;
    std::vector<std::pair<int, Weight>> zero_points; // exact value 0, left out of the ratio statistics
    std::size_t out_of_domain = 0;                   // grid points where the shape is undefined
    long double min_ratio = 0, max_ratio = 0, spread = 0;
    double envelope = 0;
    bool shapes_positive = true;
    bool envelope_passed = false; // spread <= envelope and all shapes positive
    std::vector<DriftCheck> drift;
    std::vector<SlopeCheck> slopes;
    std::vector<HarnackEntry> harnack;
    std::vector<std::string> notes;

    bool checks_passed() const
    {
        return std::all_of(drift.begin(), drift.end(), [](const auto& d) { return d.passed; }) &&
               std::all_of(slopes.begin(), slopes.end(), [](const auto& s) { return s.passed; });
    }
    bool passed() const { return envelope_passed && checks_passed(); }
};

namespace detail {

inline void finish_statistics(RatioReport& rep)
{
    if (rep.rows.empty()) throw std::invalid_argument("ratio report: empty admissible grid");
    sort_rows(rep.rows);
    rep.min_ratio = rep.max_ratio = *rep.rows.front().ratio;
    for (const auto& row : rep.rows) {
        if (!(*row.shape > 0) || !std::isfinite(static_cast<double>(*row.shape))) rep.shapes_positive = false;
        rep.min_ratio = std::min(rep.min_ratio, *row.ratio);
        rep.max_ratio = std::max(rep.max_ratio, *row.ratio);
    }
    rep.spread = rep.min_ratio > 0 ? rep.max_ratio / rep.min_ratio : std::numeric_limits<long double>::infinity();
    rep.envelope_passed = rep.shapes_positive && rep.spread <= rep.envelope;
}

inline std::string weight_string(const Weight& w)
{
    std::string s = "(";
    for (int i = 0; i < w.rank(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s + ")";
}

inline std::string direction_string(const std::vector<Rational>& d)
{
    std::string s = "(";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + d[i].get_str();
    return s + ")";
}

inline std::optional<Weight> scaled_direction(const std::vector<Rational>& d, int n)
{
    std::vector<int> m;
    for (const auto& x : d) {
        const Rational v = x * n;
        if (v.get_den() != 1) return std::nullopt;
        m.push_back(static_cast<int>(v.get_num().get_si()));
    }
    return Weight(m);
}

} // namespace detail

struct InteriorOptions {
    std::vector<int> ns;
    int k_cfg = 1; // grid is length(lambda) <= n - k_cfg
    std::vector<std::vector<Rational>> directions;
    std::vector<std::pair<int, int>> doubling;
    double envelope = 0;
    double max_drift = 1.0;
    bool skip_unavailable_drift = false; // note and skip drift points off the lattice or the grid instead of throwing
    bool harnack = true;
    KernelLimits limits{};
};

// Heat kernel versus the interior shape on {length(lambda) <= n - k_cfg}.
inline RatioReport interior_report(const WalkSpec& walk, const InteriorOptions& opt)
{
    RatioReport rep;
    rep.regime = "interior";
    rep.walk = walk;
    rep.envelope = opt.envelope;
    const Estimates est(walk);
    std::ostringstream grid;
    grid << "rank " << walk.p.r << ", q " << walk.p.q << ", length(lambda) <= n - " << opt.k_cfg << ", n in {";
    for (std::size_t i = 0; i < opt.ns.size(); ++i) grid << (i ? "," : "") << opt.ns[i];
    grid << "}";
    rep.grid = grid.str();

    std::map<std::pair<int, Weight>, long double> ratio_at;
    for (int n : opt.ns) {
        const auto table = kernel_table(walk, n, opt.limits);
        for (const auto& [lambda, v] : table.entries) {
            if (length(lambda) > n - opt.k_cfg) continue;
            if (v.is_zero()) {
                rep.zero_points.emplace_back(n, lambda);
                continue;
            }
            ReportRow row;
            row.n = n;
            row.lambda = lambda;
            row.exact = v;
            row.exact_float = v.to_long_double();
            const auto e = est.heat(n, lambda);
            row.shape = e.value();
            row.ratio = std::exp(std::log(row.exact_float) - e.log_value);
            ratio_at[{n, lambda}] = *row.ratio;
            rep.rows.push_back(std::move(row));
        }
        if (opt.harnack) {
            const auto next = kernel_table(walk, n + 1, opt.limits);
            HarnackEntry h{n, 0};
            for (const auto& [x, vx] : next.entries) {
                if (vx.is_zero()) continue;
                const long double px = vx.to_long_double();
                for (const auto& t : radial_transitions(x, walk.p))
                    h.sup = std::max(h.sup, table.value(t.target).to_long_double() / px);
            }
            rep.harnack.push_back(h);
        }
    }
    detail::finish_statistics(rep);

    for (const auto& d : opt.directions) {
        for (const auto& [n1, n2] : opt.doubling) {
            DriftCheck c;
            c.direction = detail::direction_string(d);
            c.n1 = n1;
            c.n2 = n2;
            const auto l1 = detail::scaled_direction(d, n1), l2 = detail::scaled_direction(d, n2);
            const std::string where = c.direction + " " + std::to_string(n1) + "->" + std::to_string(n2);
            if (!l1 || !l2) {
                if (opt.skip_unavailable_drift) {
                    rep.notes.push_back("drift " + where + " skipped: direction times n is not integral");
                    continue;
                }
                throw std::invalid_argument("drift check: direction times n is not integral");
            }
            c.lambda1 = *l1;
            c.lambda2 = *l2;
            auto a = ratio_at.find({n1, *l1}), b = ratio_at.find({n2, *l2});
            if (a == ratio_at.end() || b == ratio_at.end()) {
                const std::string msg = "point " + detail::weight_string(*l1) + " or " + detail::weight_string(*l2) + " not on the grid";
                if (opt.skip_unavailable_drift) {
                    rep.notes.push_back("drift " + where + " skipped: " + msg);
                    continue;
                }
                throw std::invalid_argument("drift check: " + msg);
            }
            c.log_change = std::log(b->second) - std::log(a->second);
            c.passed = std::fabs(c.log_change) <= opt.max_drift;
            rep.drift.push_back(c);
        }
    }
    return rep;
}

struct BoundaryOptions {
    std::vector<int> ns;
    int d_max = 3;
    int k_prime = 2;
    double envelope = 0;
    KernelLimits limits{};
};

// Rank 2 heat kernel versus the boundary shape on {n - d_max <= length(lambda) <= n}.
inline RatioReport boundary_report(const WalkSpec& walk, const BoundaryOptions& opt)
{
    if (walk.p.r != 2) throw std::invalid_argument("boundary report requires rank 2");
    RatioReport rep;
    rep.regime = "boundary";
    rep.walk = walk;
    rep.envelope = opt.envelope;
    const Estimates est(walk);
    std::ostringstream grid;
    grid << "rank 2, q " << walk.p.q << ", n - length(lambda) in [0, " << opt.d_max << "], K' = " << opt.k_prime
         << ", n in {";
    for (std::size_t i = 0; i < opt.ns.size(); ++i) grid << (i ? "," : "") << opt.ns[i];
    grid << "}";
    rep.grid = grid.str();
    std::size_t variant_points = 0;
    for (int n : opt.ns) {
        const auto table = kernel_table(walk, n, opt.limits);
        for (const auto& [lambda, v] : table.entries) {
            const int d = n - length(lambda);
            if (d > opt.d_max) continue;
            if (std::max(lambda[0], lambda[1]) < d) {
                ++rep.out_of_domain;
                continue;
            }
            if (v.is_zero()) {
                rep.zero_points.emplace_back(n, lambda);
                continue;
            }
            const auto e = est.boundary_rank2(n, lambda, opt.k_prime);
            if (e.corner_form) ++variant_points;
            ReportRow row;
            row.n = n;
            row.lambda = lambda;
            row.exact = v;
            row.exact_float = v.to_long_double();
            row.shape = e.value();
            row.ratio = std::exp(std::log(row.exact_float) - e.log_value);
            rep.rows.push_back(std::move(row));
        }
    }
    detail::finish_statistics(rep);
    rep.notes.push_back("points using the n - x1 v x2 <= K' form: " + std::to_string(variant_points));
    rep.notes.push_back("points with x1 v x2 < n - length(lambda) (outside the binomial range): " +
                        std::to_string(rep.out_of_domain));
    return rep;
}

struct GreenReportOptions {
    Rational fraction = make_rational(1, 2); // z = fraction / rho_tilde; 1 selects the critical regime
    std::vector<Weight> rays;
    int length_min = 4;
    int length_max = 24;
    double envelope = 0;
    double slope_rel_tol = 0.05; // subcritical only
    GreenOptions green{};
};

// Green function versus its subcritical or critical shape along rays k * ray.
inline RatioReport green_report(const WalkSpec& walk, const GreenReportOptions& opt)
{
    const bool critical = opt.fraction == 1;
    RatioReport rep;
    rep.regime = critical ? "green_critical" : "green";
    rep.walk = walk;
    rep.envelope = opt.envelope;
    std::vector<Weight> targets;
    std::vector<std::size_t> ray_of;
    for (std::size_t r = 0; r < opt.rays.size(); ++r) {
        const Weight& ray = opt.rays[r];
        if (ray.rank() != walk.p.r || !is_dominant(ray) || length(ray) == 0) throw std::invalid_argument("green report: bad ray");
        for (int k = 1; k * length(ray) <= opt.length_max; ++k) {
            if (k * length(ray) < opt.length_min) continue;
            Weight l = Weight::zero(walk.p.r);
            for (int i = 0; i < walk.p.r; ++i) l[i] = k * ray[i];
            targets.push_back(l);
            ray_of.push_back(r);
        }
    }
    if (targets.empty()) throw std::invalid_argument("green report: empty admissible grid");
    const auto batch = green_exact_fraction(walk, targets, opt.fraction, opt.green);
    const Estimates est(walk);
    std::ostringstream grid;
    grid << "rank " << walk.p.r << ", q " << walk.p.q << ", z = " << opt.fraction.get_str() << " / rho_tilde, length in ["
         << opt.length_min << ", " << opt.length_max << "], rays";
    for (const auto& ray : opt.rays) grid << " " << detail::weight_string(ray);
    rep.grid = grid.str();
    rep.notes.push_back(batch.truncation_note);

    std::vector<std::vector<std::pair<long double, long double>>> fit(opt.rays.size());
    const long double m = walk.p.num_positive_roots() + 0.5L * (walk.p.r - 1);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& res = batch.results[i];
        if (!(res.value > 0)) {
            rep.zero_points.emplace_back(res.terms, res.lambda);
            continue;
        }
        const auto e = critical ? est.green_critical(res.lambda) : est.green(res.lambda, batch.z);
        ReportRow row;
        row.n = res.terms;
        row.lambda = res.lambda;
        row.exact_float = res.value;
        row.shape = e.value();
        row.ratio = std::exp(std::log(res.value) - e.log_value);
        rep.rows.push_back(std::move(row));
        const long double len = length(res.lambda);
        fit[ray_of[i]].emplace_back(len, std::log(res.value) + m * std::log(len) - est.log_F0(res.lambda));
        if (!res.certified && !critical) rep.notes.push_back("uncertified tail at " + detail::weight_string(res.lambda));
    }
    detail::finish_statistics(rep);
    if (critical) return rep;

    for (std::size_t r = 0; r < opt.rays.size(); ++r) {
        const auto& pts = fit[r];
        if (pts.size() < 2) continue;
        long double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const long double k = pts.size();
        SlopeCheck c;
        c.ray = detail::weight_string(opt.rays[r]);
        c.fitted = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        const auto gs = green_saddle(opt.rays[r], batch.z, walk);
        long double pair = 0;
        for (int i = 0; i < walk.p.r; ++i) pair += opt.rays[r][i] * gs.s0(i);
        c.expected = -pair / length(opt.rays[r]);
        c.rel_error = std::fabs(c.fitted / c.expected - 1);
        c.passed = c.rel_error <= opt.slope_rel_tol;
        rep.slopes.push_back(c);
    }
    return rep;
}

// ---- tables ----------------------------------------------------------------

inline std::vector<ReportRow> kernel_rows(const KernelTable& t)
{
    std::vector<ReportRow> rows;
    for (const auto& [lambda, v] : t.entries) {
        ReportRow row;
        row.n = t.n;
        row.lambda = lambda;
        row.exact = v;
        row.exact_float = v.to_long_double();
        rows.push_back(std::move(row));
    }
    sort_rows(rows);
    return rows;
}

namespace detail {

inline std::string format_real(long double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.21Lg", x);
    return buf;
}

inline long double parse_real(const std::string& s)
{
    std::size_t pos = 0;
    const long double v = std::stold(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad real: " + s);
    return v;
}

inline BigInt parse_bigint(const std::string& s)
{
    BigInt v;
    if (s.empty() || v.set_str(s, 10) != 0) throw std::invalid_argument("bad integer: " + s);
    return v;
}

inline QuadraticScalar assemble(long q, const std::string& an, const std::string& ad, const std::string& bn, const std::string& bd)
{
    Rational a(parse_bigint(an), parse_bigint(ad)), b(parse_bigint(bn), parse_bigint(bd));
    a.canonicalize();
    b.canonicalize();
    return QuadraticScalar(q, a, b);
}

inline std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace detail

inline std::vector<std::string> row_columns(int r)
{
    std::vector<std::string> cols{"n"};
    for (int i = 1; i <= r; ++i) cols.push_back("m_" + std::to_string(i));
    for (const char* c : {"exact_num", "exact_den", "exact_sqrt_num", "exact_sqrt_den", "exact_float", "shape", "ratio"}) cols.push_back(c);
    return cols;
}

inline void write_csv(std::ostream& out, const std::vector<ReportRow>& rows, int r)
{
    const auto cols = row_columns(r);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const auto& row : rows) {
        out << row.n;
        for (int i = 0; i < r; ++i) out << "," << row.lambda[i];
        if (row.exact) {
            out << "," << row.exact->rational_part().get_num().get_str() << "," << row.exact->rational_part().get_den().get_str()
                << "," << row.exact->sqrt_part().get_num().get_str() << "," << row.exact->sqrt_part().get_den().get_str();
        } else {
            out << ",,,,";
        }
        out << "," << detail::format_real(row.exact_float);
        out << "," << (row.shape ? detail::format_real(*row.shape) : "");
        out << "," << (row.ratio ? detail::format_real(*row.ratio) : "");
        out << "\n";
    }
}

inline std::vector<ReportRow> read_csv(std::istream& in, long q)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header");
    const auto header = detail::split_csv(line);
    const int r = static_cast<int>(header.size()) - 8;
    if (r < 1 || header != row_columns(r)) throw std::invalid_argument("csv: unexpected header");
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != header.size()) throw std::invalid_argument("csv: wrong field count");
        ReportRow row;
        row.n = std::stoi(f[0]);
        std::vector<int> m;
        for (int i = 0; i < r; ++i) m.push_back(std::stoi(f[static_cast<std::size_t>(1 + i)]));
        row.lambda = Weight(m);
        const std::size_t e = static_cast<std::size_t>(1 + r);
        if (!f[e].empty()) row.exact = detail::assemble(q, f[e], f[e + 1], f[e + 2], f[e + 3]);
        row.exact_float = detail::parse_real(f[e + 4]);
        if (!f[e + 5].empty()) row.shape = detail::parse_real(f[e + 5]);
        if (!f[e + 6].empty()) row.ratio = detail::parse_real(f[e + 6]);
        rows.push_back(std::move(row));
    }
    return rows;
}

// JSON array of records; integers of the exact value are strings, reals are strings
// with 21 significant digits so long double values survive the round trip.
inline nlohmann::json rows_to_json(const std::vector<ReportRow>& rows)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json j;
        j["n"] = row.n;
        for (int i = 0; i < row.lambda.rank(); ++i) j["m_" + std::to_string(i + 1)] = row.lambda[i];
        if (row.exact) {
            j["exact_num"] = row.exact->rational_part().get_num().get_str();
            j["exact_den"] = row.exact->rational_part().get_den().get_str();
            j["exact_sqrt_num"] = row.exact->sqrt_part().get_num().get_str();
            j["exact_sqrt_den"] = row.exact->sqrt_part().get_den().get_str();
        } else {
            for (const char* k : {"exact_num", "exact_den", "exact_sqrt_num", "exact_sqrt_den"}) j[k] = nullptr;
        }
        j["exact_float"] = detail::format_real(row.exact_float);
        j["shape"] = row.shape ? nlohmann::json(detail::format_real(*row.shape)) : nlohmann::json(nullptr);
        j["ratio"] = row.ratio ? nlohmann::json(detail::format_real(*row.ratio)) : nlohmann::json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::vector<ReportRow> rows_from_json(const nlohmann::json& arr, long q)
{
    if (!arr.is_array()) throw std::invalid_argument("json: expected an array of records");
    std::vector<ReportRow> rows;
    for (const auto& j : arr) {
        ReportRow row;
        row.n = j.at("n").get<int>();
        std::vector<int> m;
        for (int i = 1; j.contains("m_" + std::to_string(i)); ++i) m.push_back(j.at("m_" + std::to_string(i)).get<int>());
        if (m.empty()) throw std::invalid_argument("json: record without coordinates");
        row.lambda = Weight(m);
        if (!j.at("exact_num").is_null())
            row.exact = detail::assemble(q, j.at("exact_num").get<std::string>(), j.at("exact_den").get<std::string>(),
                                         j.at("exact_sqrt_num").get<std::string>(), j.at("exact_sqrt_den").get<std::string>());
        row.exact_float = detail::parse_real(j.at("exact_float").get<std::string>());
        if (!j.at("shape").is_null()) row.shape = detail::parse_real(j.at("shape").get<std::string>());
        if (!j.at("ratio").is_null()) row.ratio = detail::parse_real(j.at("ratio").get<std::string>());
        rows.push_back(std::move(row));
    }
    return rows;
}

// Human-readable summary of a ratio report.
inline void write_summary(std::ostream& out, const RatioReport& rep)
{
    out << "regime: " << rep.regime << "\n";
    out << "grid: " << rep.grid << "\n";
    out << "points: " << rep.rows.size() << ", zero-probability points: " << rep.zero_points.size() << "\n";
    out << "ratio min " << detail::format_real(rep.min_ratio) << ", max " << detail::format_real(rep.max_ratio) << ", spread "
        << detail::format_real(rep.spread) << ", envelope " << rep.envelope << " -> "
        << (rep.envelope_passed ? "within envelope" : "ENVELOPE VIOLATION") << "\n";
    for (const auto& d : rep.drift)
        out << "drift " << d.direction << " n " << d.n1 << " -> " << d.n2 << ": log-ratio change "
            << detail::format_real(d.log_change) << (d.passed ? "" : "  (exceeds limit)") << "\n";
    for (const auto& s : rep.slopes)
        out << "slope along " << s.ray << ": fitted " << detail::format_real(s.fitted) << ", saddle "
            << detail::format_real(s.expected) << ", relative error " << detail::format_real(s.rel_error)
            << (s.passed ? "" : "  (exceeds tolerance)") << "\n";
    for (const auto& h : rep.harnack) out << "harnack n " << h.n << ": sup p^n(0,y)/p^(n+1)(0,x) = " << detail::format_real(h.sup) << "\n";
    for (const auto& z : rep.zero_points) out << "zero: n " << z.first << " lambda " << detail::weight_string(z.second) << "\n";
    for (const auto& note : rep.notes) out << "note: " << note << "\n";
}

} // namespace bwalk
