// Green function of the rank-1 walk (the regular tree) along a geodesic, at half the
// radius of convergence and at the critical point.

#include "bwalk/green.hpp"

#include <cstdio>

int main()
{
    using namespace bwalk;
    const auto walk = WalkSpec::simple(RankParams(1, 3));
    std::vector<Weight> targets;
    for (int k = 0; k <= 8; ++k) targets.push_back(Weight({k}));
    const auto half = green_exact_fraction(walk, targets, make_rational(1, 2));
    const auto crit = green_exact_fraction(walk, targets, Rational(1));
    std::printf(" k  G(z = 1/(2 rho~))   terms  G(z = 1/rho~)\n");
    for (std::size_t i = 0; i < targets.size(); ++i)
        std::printf("%2d  %.15Le  %5d  %.6Le\n", targets[i][0], half.results[i].value, half.results[i].terms, crit.results[i].value);
    std::printf("%s\n%s\n", half.truncation_note.c_str(), crit.truncation_note.c_str());
}
