#include "bwalk/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace bwalk;

namespace {

std::vector<ReportRow> mixed_rows()
{
    // q = 3 kernel rows plus a Green-style row without an exact value
    auto rows = kernel_rows(kernel_table(WalkSpec::simple(RankParams(2, 3)), 3));
    rows[0].shape = 0.123456789012345678901L;
    rows[0].ratio = 1.0L / 3;
    ReportRow g;
    g.n = 40;
    g.lambda = Weight({4, 4});
    g.exact_float = 2.718281828459045235360L;
    g.shape = 1e-30L;
    g.ratio = 7.25L;
    rows.push_back(g);
    return rows;
}

bool has_sqrt_part(const std::vector<ReportRow>& rows)
{
    for (const auto& r : rows)
        if (r.exact && r.exact->sqrt_part() != 0) return true;
    return false;
}

} // namespace

TEST(Report, KernelRowsAreSorted)
{
    const auto rows = kernel_rows(kernel_table(WalkSpec::simple(RankParams(2, 2)), 2));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows.front().lambda, Weight({0, 0}));
    EXPECT_EQ(*rows.front().exact, QuadraticScalar(2, make_rational(1, 14)));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_TRUE(rows[i - 1].lambda < rows[i].lambda);
}

TEST(Report, CsvRoundTripIsLossless)
{
    const auto rows = mixed_rows();
    std::ostringstream out;
    write_csv(out, rows, 2);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "n,m_1,m_2,exact_num,exact_den,exact_sqrt_num,exact_sqrt_den,exact_float,shape,ratio");
    std::istringstream in(out.str());
    EXPECT_EQ(read_csv(in, 3), rows);
}

TEST(Report, JsonRoundTripIsLossless)
{
    const auto rows = mixed_rows();
    const auto j = nlohmann::json::parse(rows_to_json(rows).dump());
    EXPECT_TRUE(j.back()["exact_num"].is_null());
    EXPECT_EQ(rows_from_json(j, 3), rows);
}

TEST(Report, OddStepsCarrySqrtPart)
{
    // rank 3 step weights involve q^{-E/2}, so three steps at q = 3 carry sqrt(3) parts
    const auto rows = kernel_rows(kernel_table(WalkSpec::simple(RankParams(3, 3)), 3));
    EXPECT_TRUE(has_sqrt_part(rows));
    std::ostringstream out;
    write_csv(out, rows, 3);
    std::istringstream in(out.str());
    EXPECT_EQ(read_csv(in, 3), rows);
}

TEST(Report, CsvRejectsMalformedInput)
{
    std::istringstream empty("");
    EXPECT_THROW(read_csv(empty, 2), std::invalid_argument);
    std::istringstream header("n,m_1,bogus\n");
    EXPECT_THROW(read_csv(header, 2), std::invalid_argument);
    std::istringstream fields("n,m_1,exact_num,exact_den,exact_sqrt_num,exact_sqrt_den,exact_float,shape,ratio\n1,1,1\n");
    EXPECT_THROW(read_csv(fields, 2), std::invalid_argument);
    EXPECT_THROW(rows_from_json(nlohmann::json::object(), 2), std::invalid_argument);
}

TEST(Report, InteriorReportIsWellFormed)
{
    InteriorOptions opt;
    opt.ns = {4, 8};
    opt.envelope = 1e6;
    opt.directions = {{make_rational(1, 4), make_rational(1, 4)}};
    opt.doubling = {{4, 8}};
    const auto rep = interior_report(WalkSpec::simple(RankParams(2, 2)), opt);
    EXPECT_EQ(rep.regime, "interior");
    EXPECT_TRUE(rep.envelope_passed);
    EXPECT_GE(rep.spread, 1);
    EXPECT_LE(rep.min_ratio, rep.max_ratio);
    for (const auto& row : rep.rows) {
        EXPECT_LE(length(row.lambda), row.n - 1);
        EXPECT_GT(*row.ratio, 0);
    }
    ASSERT_EQ(rep.drift.size(), 1u);
    EXPECT_EQ(rep.drift[0].lambda1, Weight({1, 1}));
    EXPECT_EQ(rep.drift[0].lambda2, Weight({2, 2}));
    ASSERT_EQ(rep.harnack.size(), 2u);
    EXPECT_GT(rep.harnack[0].sup, 0);
    std::ostringstream s;
    write_summary(s, rep);
    EXPECT_NE(s.str().find("within envelope"), std::string::npos);
}

TEST(Report, TinyEnvelopeIsViolated)
{
    InteriorOptions opt;
    opt.ns = {6};
    opt.envelope = 1.0001;
    opt.harnack = false;
    const auto rep = interior_report(WalkSpec::simple(RankParams(1, 2)), opt);
    EXPECT_FALSE(rep.envelope_passed);
    EXPECT_FALSE(rep.passed());
}

TEST(Report, DriftPointsOffTheLattice)
{
    InteriorOptions opt;
    opt.ns = {4, 6};
    opt.envelope = 1e6;
    opt.harnack = false;
    opt.directions = {{make_rational(1, 4), Rational(0)}};
    opt.doubling = {{4, 6}};
    const auto w = WalkSpec::simple(RankParams(2, 2));
    EXPECT_THROW(interior_report(w, opt), std::invalid_argument);
    opt.skip_unavailable_drift = true;
    const auto rep = interior_report(w, opt);
    EXPECT_TRUE(rep.drift.empty());
    ASSERT_FALSE(rep.notes.empty());
    EXPECT_NE(rep.notes.back().find("skipped"), std::string::npos);
}

TEST(Report, EmptyGridThrows)
{
    InteriorOptions opt;
    opt.ns = {0};
    opt.harnack = false;
    EXPECT_THROW(interior_report(WalkSpec::simple(RankParams(2, 2)), opt), std::invalid_argument);
}

TEST(Report, BoundaryReportNotes)
{
    BoundaryOptions opt;
    opt.ns = {8};
    opt.d_max = 6; // reaches (1,1) with n - length 6, outside the binomial range
    opt.envelope = 1e6;
    const auto rep = boundary_report(WalkSpec::simple(RankParams(2, 2)), opt);
    EXPECT_EQ(rep.regime, "boundary");
    for (const auto& row : rep.rows) EXPECT_GE(length(row.lambda), 8 - opt.d_max);
    ASSERT_EQ(rep.notes.size(), 2u);
    EXPECT_NE(rep.notes[0].find("K'"), std::string::npos);
    EXPECT_GT(rep.out_of_domain, 0u);
    EXPECT_THROW(boundary_report(WalkSpec::simple(RankParams(1, 2)), opt), std::invalid_argument);
}

TEST(Report, GreenReports)
{
    const auto w = WalkSpec::simple(RankParams(2, 2));
    GreenReportOptions opt;
    opt.rays = {Weight({1, 0}), Weight({1, 1})};
    opt.length_min = 2;
    opt.length_max = 8;
    opt.envelope = 1e6;
    const auto sub = green_report(w, opt);
    EXPECT_EQ(sub.regime, "green");
    EXPECT_EQ(sub.slopes.size(), 2u);
    for (const auto& row : sub.rows) EXPECT_FALSE(row.exact.has_value());

    opt.fraction = Rational(1);
    opt.green.critical_terms = 60;
    const auto crit = green_report(w, opt);
    EXPECT_EQ(crit.regime, "green_critical");
    EXPECT_TRUE(crit.slopes.empty());
    ASSERT_FALSE(crit.notes.empty());
    EXPECT_NE(crit.notes.front().find("heuristic"), std::string::npos);
}
