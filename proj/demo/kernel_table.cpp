// Exact n-step return probabilities of the simple walk on a rank-2 building, with the
// interior estimate shape alongside.

#include "bwalk/estimates.hpp"
#include "bwalk/exact_kernel.hpp"

#include <cstdio>
#include <iostream>

int main()
{
    using namespace bwalk;
    const auto walk = WalkSpec::simple(RankParams(2, 2));
    std::cout << "n  p^n(0,0)  shape  ratio\n";
    for (int n = 2; n <= 16; n += 2) {
        const QuadraticScalar p = pn_exact(walk, n, Weight::zero(2));
        const auto e = heat_shape(n, Weight::zero(2), walk);
        std::printf("%2d  %-28s %.6Le  %.4Lf\n", n, p.to_string().c_str(), e.value(), p.to_long_double() / e.value());
    }
}
