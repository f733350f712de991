// Saddle point s(delta) and rate phi(delta) along the diagonal of the rank-2 chamber.

#include "bwalk/saddle.hpp"

#include <cstdio>

int main()
{
    using namespace bwalk;
    const auto walk = WalkSpec::simple(RankParams(2, 2));
    std::printf("delta       s_1        s_2        phi        iterations\n");
    for (int i = 0; i <= 9; ++i) {
        SVec d(2);
        d << 0.05L * i, 0.05L * i;
        const auto sol = solve_saddle(d, walk);
        const SVec s = chamber_coordinates(sol.s);
        std::printf("%.2Lf  %10.6Lf %10.6Lf %10.6Lf  %d\n", d(0), s(0), s(1), sol.phi, sol.iterations);
    }
}
