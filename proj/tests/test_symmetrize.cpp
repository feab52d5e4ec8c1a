#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "circsym/grid.hpp"
#include "circsym/symmetrize.hpp"
#include "test_util.hpp"

using namespace circsym;

namespace {

// u = 1 on {x1 x2 > 0}, 0 elsewhere (the four-quadrant indicator)
ScalarField quadrant_field(int nr, int ntheta, double rmax = 1.0) {
    PolarGrid g(nr, ntheta, 0, 0.0, rmax);
    ScalarField u(g);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < ntheta; ++j) {
            double th = g.theta(j);
            u.set(i, j, 0, std::cos(th) * std::sin(th) > 0.0 ? 1.0 : 0.0);
        }
    return u;
}

ScalarField quarter_disc_u0(int nr, int ntheta) {
    PolarGrid g(nr, ntheta, 0, 0.0, 1.0);
    ScalarField u(g);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < ntheta; ++j) {
            double th = g.theta(j);
            if (th > 0.0 && th < kPi / 2.0) u.set(i, j, 0, g.r(i) * std::cos(th));
        }
    return extend_by_zero(u);
}

}  // namespace

TEST_CASE("slice_arc_measure") {
    SUBCASE("constant circle") {
        PolarGrid g(4, 64, 0, 0.0, 2.0);
        ScalarField u = ScalarField::constant(g, 3.0);
        for (int i = 0; i < g.nr; ++i) {
            CHECK(slice_arc_measure(u, i, 0, 2.0) ==
                  doctest::Approx(2.0 * kPi * g.r(i)).epsilon(1e-12));
            CHECK(slice_arc_measure(u, i, 0, 3.0) == 0.0);
        }
    }

    SUBCASE("four-quadrant indicator at t=1/2 has measure pi r (exact arc oracle)") {
        ScalarField u = quadrant_field(8, 256);
        const PolarGrid& g = u.grid();
        for (int i = 0; i < g.nr; ++i)
            CHECK(slice_arc_measure(u, i, 0, 0.5) ==
                  doctest::Approx(kPi * g.r(i)).epsilon(1e-9));
    }

    SUBCASE("quarter-disc u0 at r=1/2, t=1/4: arccos oracle gives (1/2)(pi/3)") {
        ScalarField u0 = quarter_disc_u0(256, 1024);
        const PolarGrid& g = u0.grid();
        int i = 0;
        for (int c = 0; c < g.nr; ++c)
            if (std::fabs(g.r(c) - 0.5) < std::fabs(g.r(i) - 0.5)) i = c;
        double r = g.r(i);
        // oracle: {r cos(theta) > t} within (0, pi/2) is (0, arccos(t/r))
        double expect = r * std::acos(0.25 / r);
        CHECK(slice_arc_measure(u0, i, 0, 0.25) ==
              doctest::Approx(expect).epsilon(0.02));
        CHECK(expect == doctest::Approx(0.5 * kPi / 3.0).epsilon(0.01));
    }

    SUBCASE("EMPTY slice is a domain error") {
        PolarGrid g(4, 8, 0, 0.0, 1.0);
        ScalarField u(g);
        u.set(0, 0, 0, 1.0);
        CHECK_THROWS_AS(slice_arc_measure(u, 2, 0, 0.0), std::domain_error);
    }
}

TEST_CASE("distribution tables") {
    SUBCASE("constant field: one breakpoint, 2 pi r down to 0") {
        PolarGrid g(4, 32, 0, 0.5, 1.5);
        ScalarField u = ScalarField::constant(g, 2.0);
        DistributionTable t = distribution(u);
        for (int i = 0; i < g.nr; ++i) {
            const SliceDistribution& s = t.slice(i, 0);
            REQUIRE(s.thresholds.size() == 1);
            CHECK(s.thresholds[0] == 2.0);
            CHECK(s.mu(1.9) == doctest::Approx(2.0 * kPi * g.r(i)).epsilon(1e-12));
            CHECK(s.mu(2.0) == 0.0);
        }
    }

    SUBCASE("four-quadrant field: 2 pi r / pi r / 0") {
        ScalarField u = quadrant_field(8, 256);
        DistributionTable t = distribution(u);
        const PolarGrid& g = u.grid();
        for (int i = 0; i < g.nr; ++i) {
            double full = 2.0 * kPi * g.r(i);
            CHECK(t.mu(i, 0, -0.5) == doctest::Approx(full).epsilon(1e-12));
            CHECK(t.mu(i, 0, 0.0) == doctest::Approx(0.5 * full).epsilon(1e-12));
            CHECK(t.mu(i, 0, 0.5) == doctest::Approx(0.5 * full).epsilon(1e-12));
            CHECK(t.mu(i, 0, 1.0) == 0.0);
        }
    }

    SUBCASE("mu reproduces exact cell counting at arbitrary t") {
        ScalarField u0 = extend_by_zero(testutil::random_bump_field(
            PolarGrid(24, 48, 0, 0.0, 1.0), 11));
        DistributionTable t = distribution(u0);
        const PolarGrid& g = u0.grid();
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> T(-0.5, 2.0);
        for (int trial = 0; trial < 200; ++trial) {
            int i = static_cast<int>(rng() % g.nr);
            double tv = T(rng);
            int cnt = 0;
            for (int j = 0; j < g.ntheta; ++j)
                if (u0(i, j, 0) > tv) ++cnt;
            CHECK(t.mu(i, 0, tv) == doctest::Approx(cnt * g.r(i) * g.dtheta()).epsilon(1e-13));
        }
    }

    SUBCASE("monotone and right-continuous") {
        ScalarField u0 = extend_by_zero(testutil::random_bump_field(
            PolarGrid(16, 32, 0, 0.0, 1.0), 5));
        DistributionTable t = distribution(u0);
        const SliceDistribution& s = t.slice(8, 0);
        for (std::size_t l = 0; l + 1 < s.thresholds.size(); ++l)
            CHECK(s.count_above[l] > s.count_above[l + 1]);
        // value AT a breakpoint equals the value just after it
        for (double tb : s.thresholds)
            CHECK(s.mu(tb) == s.mu(tb + 1e-13));
        CHECK(s.mu(s.thresholds.back()) == 0.0);
    }

    SUBCASE("mixed slices are rejected, restricted_distribution accepts them") {
        PolarGrid g(4, 8, 0, 0.0, 1.0);
        ScalarField u(g);
        u.set(0, 0, 0, 1.0);  // one covered cell on an otherwise OUTSIDE slice
        CHECK_THROWS_AS(distribution(u), std::invalid_argument);
        DistributionTable t = restricted_distribution(u);
        CHECK(t.slice(0, 0).count_total == 1);
        CHECK(t.slice(1, 0).count_total == 0);
    }
}

TEST_CASE("restricted distribution mu'") {
    SUBCASE("nonnegative u: mu' = mu for t >= 0") {
        ScalarField u = testutil::random_bump_field(PolarGrid(16, 32, 0, 0.0, 1.0), 9);
        DistributionTable m = distribution(extend_by_zero(u));
        DistributionTable mp = restricted_distribution(u);
        for (int i = 0; i < 16; ++i)
            for (double t : {0.0, 0.1, 0.5, 1.0})
                CHECK(mp.mu(i, 0, t) == doctest::Approx(m.mu(i, 0, t)).epsilon(1e-13));
    }

    SUBCASE("wedge: mu' < mu for negative thresholds") {
        PolarGrid g(32, 128, 0, 1.0, 2.0);
        double a = 0.5;
        ScalarField u(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                double th = std::fabs(g.theta(j));
                if (th < kPi / 4.0 + a * (g.r(i) - 1.0))
                    u.set(i, j, 0, th <= kPi / 4.0 ? th - kPi / 4.0 : 0.0);
            }
        DistributionTable m = distribution(extend_by_zero(u));
        DistributionTable mp = restricted_distribution(u);
        CHECK(mp.mu(16, 0, -0.5) < m.mu(16, 0, -0.5));
        // entrywise mu' <= mu
        for (int i = 0; i < g.nr; ++i)
            for (double t : {-0.7, -0.3, -0.1, 0.0, 0.5})
                CHECK(mp.mu(i, 0, t) <= m.mu(i, 0, t) + 1e-13);
    }

    SUBCASE("empty superlevel set gives 0") {
        PolarGrid g(4, 8, 0, 0.0, 1.0);
        ScalarField u = ScalarField::constant(g, 1.0);
        CHECK(restricted_distribution(u).mu(0, 0, 5.0) == 0.0);
    }
}

TEST_CASE("rearrange") {
    SUBCASE("four-quadrant field becomes the half-circle indicator") {
        ScalarField u = quadrant_field(8, 128);
        ScalarField v = rearrange(distribution(u), u.grid());
        const PolarGrid& g = u.grid();
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                REQUIRE(v.inside(i, j, 0));
                double expect = std::fabs(g.theta(j)) < kPi / 2.0 ? 1.0 : 0.0;
                CHECK(v(i, j, 0) == expect);
            }
    }

    SUBCASE("brute-force quantile oracle on random fields") {
        PolarGrid g(12, 32, 0, 0.0, 1.0);
        ScalarField u0 = extend_by_zero(testutil::random_bump_field(g, 21));
        ScalarField v = rearrange(distribution(u0), g);
        std::vector<int> order = testutil::oracle_rank_order(g);
        for (int i = 0; i < g.nr; ++i) {
            std::vector<double> samples;
            for (int j = 0; j < g.ntheta; ++j) samples.push_back(u0(i, j, 0));
            for (int q = 0; q < g.ntheta; ++q)
                CHECK(v(i, order[q], 0) == testutil::oracle_quantile(samples, q));
        }
    }

    SUBCASE("quarter disc matches (x1^2 - x2^2)/|x| away from the seam") {
        ScalarField u0 = quarter_disc_u0(128, 512);
        const PolarGrid& g = u0.grid();
        ScalarField v = rearrange(distribution(u0), g);
        double max_err = 0.0;
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                double th = g.theta(j);
                if (std::fabs(th) > kPi - 0.1) continue;
                double expect =
                    std::fabs(th) < kPi / 4.0 ? g.r(i) * std::cos(2.0 * th) : 0.0;
                max_err = std::max(max_err, std::fabs(v(i, j, 0) - expect));
            }
        CHECK(max_err < 0.02);  // relative to sup |v| = 1
    }

    SUBCASE("symmetric decreasing field is a fixed point") {
        PolarGrid g(8, 64, 0, 0.0, 1.0);
        ScalarField u(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                // exact +- pairing via the half-cell offset |2j+1-n|
                double absth = std::abs(2 * j + 1 - g.ntheta) * (0.5 * g.dtheta());
                u.set(i, j, 0, std::max(0.0, 1.0 - absth));
            }
        ScalarField v = rearrange(distribution(u), g);
        CHECK(v.values() == u.values());
    }

    SUBCASE("idempotence is exact") {
        PolarGrid g(16, 64, 0, 0.0, 1.0);
        ScalarField u0 = extend_by_zero(testutil::random_bump_field(g, 33));
        ScalarField v = rearrange(distribution(u0), g);
        ScalarField vv = rearrange(distribution(v), g);
        CHECK(vv.values() == v.values());
        CHECK(vv.inside_mask() == v.inside_mask());
    }

    SUBCASE("monotone in |theta|, and even up to sample pairing") {
        PolarGrid g(8, 32, 0, 0.0, 1.0);
        ScalarField u0 = extend_by_zero(testutil::random_bump_field(g, 42));
        ScalarField v = rearrange(distribution(u0), g);
        std::vector<int> order = rank_order(g);
        for (int i = 0; i < g.nr; ++i)
            for (int q = 0; q + 1 < g.ntheta; ++q)
                CHECK(v(i, order[q], 0) >= v(i, order[q + 1], 0));
        // pair-degenerate samples make v exactly even
        ScalarField w = rearrange(distribution(v), g);
        for (int i = 0; i < g.nr; ++i) {
            std::vector<double> samples;
            for (int j = 0; j < g.ntheta; ++j) samples.push_back(v(i, j, 0));
            std::sort(samples.begin(), samples.end());
            bool paired = true;
            for (int q = 0; q + 1 < g.ntheta; q += 2)
                if (samples[q] != samples[q + 1]) paired = false;
            if (!paired) continue;
            for (int j = 0; j < g.ntheta; ++j) {
                int jr = g.ntheta - 1 - j;  // the cell at -theta_j
                CHECK(w(i, j, 0) == w(i, jr, 0));
            }
        }
    }

    SUBCASE("restricted table lands on Omega^s with OUTSIDE beyond") {
        PolarGrid g(16, 64, 0, 1.0, 2.0);
        ScalarField u(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j)
                if (std::fabs(g.theta(j)) < kPi / 3.0) u.set(i, j, 0, 1.0 + g.r(i));
        ScalarField w = rearrange(restricted_distribution(u), g);
        for (int i = 0; i < g.nr; ++i) {
            int numeric = 0;
            for (int j = 0; j < g.ntheta; ++j)
                if (w.inside(i, j, 0)) ++numeric;
            int expect = 0;
            for (int j = 0; j < g.ntheta; ++j)
                if (u.inside(i, j, 0)) ++expect;
            CHECK(numeric == expect);
        }
    }
}

TEST_CASE("symmetrize_set") {
    SUBCASE("centered disc is a fixed point") {
        PolarGrid g(16, 64, 0, 0.0, 1.0);
        ScalarField E(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) E.set(i, j, 0, g.r(i) < 0.5 ? 1.0 : 0.0);
        ScalarField Es = symmetrize_set(E);
        CHECK(Es.values() == E.values());
    }

    SUBCASE("two sectors merge into one centered arc of the summed width") {
        PolarGrid g(8, 128, 0, 0.0, 1.0);
        ScalarField E(g);
        int in_a = 0, in_b = 0;
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                double th = g.theta(j);
                bool a = th > 0.3 && th < 0.9;        // width a
                bool b = th > -2.4 && th < -1.6;      // width b
                E.set(i, j, 0, (a || b) ? 1.0 : 0.0);
                if (i == 0 && a) ++in_a;
                if (i == 0 && b) ++in_b;
            }
        ScalarField Es = symmetrize_set(E);
        for (int i = 0; i < g.nr; ++i) {
            int ones = 0;
            double max_on = 0.0, min_off = kPi;
            for (int j = 0; j < g.ntheta; ++j) {
                if (Es(i, j, 0) == 1.0) {
                    ++ones;
                    max_on = std::max(max_on, std::fabs(g.theta(j)));
                } else {
                    min_off = std::min(min_off, std::fabs(g.theta(j)));
                }
            }
            CHECK(ones == in_a + in_b);  // measure preserved exactly (cell count)
            CHECK(max_on < min_off + g.dtheta());  // a single centered arc
        }
    }

    SUBCASE("non-indicator input is rejected") {
        PolarGrid g(4, 8, 0, 0.0, 1.0);
        ScalarField u = ScalarField::constant(g, 0.7);
        CHECK_THROWS_AS(symmetrize_set(u), std::invalid_argument);
    }
}

TEST_CASE("equimeasurability and norm preservation are exact") {
    PolarGrid g(24, 96, 0, 0.0, 1.0);
    ScalarField u0 = extend_by_zero(testutil::random_bump_field(g, 55));
    DistributionTable t = distribution(u0);
    ScalarField v = rearrange(t, g);

    SUBCASE("superlevel measures match per slice at every breakpoint") {
        for (int i = 0; i < g.nr; i += 3) {
            const SliceDistribution& s = t.slice(i, 0);
            for (double tb : s.thresholds) {
                int cu = 0, cv = 0;
                for (int j = 0; j < g.ntheta; ++j) {
                    if (u0(i, j, 0) > tb) ++cu;
                    if (v(i, j, 0) > tb) ++cv;
                }
                CHECK(cu == cv);
            }
        }
    }

    SUBCASE("L1 and L2 norms are preserved to rounding") {
        for (double p : {1.0, 2.0}) {
            CHECK(v.lp_norm(p) == doctest::Approx(u0.lp_norm(p)).epsilon(1e-12));
        }
        // and within radial windows (same slices, same multisets)
        double nu = 0.0, nv = 0.0;
        for (int i = g.nr / 3; i < 2 * g.nr / 3; ++i) {
            double cm = g.cell_measure(i);
            for (int j = 0; j < g.ntheta; ++j) {
                nu += std::fabs(u0(i, j, 0)) * cm;
                nv += std::fabs(v(i, j, 0)) * cm;
            }
        }
        CHECK(nv == doctest::Approx(nu).epsilon(1e-12));
    }

    SUBCASE("level-set commutation is exact on breakpoints") {
        for (int i = 0; i < g.nr; i += 5) {
            const SliceDistribution& s = t.slice(i, 0);
            for (std::size_t l = 0; l < s.thresholds.size(); l += 7) {
                double tb = s.thresholds[l];
                ScalarField ind(g);
                for (int ii = 0; ii < g.nr; ++ii)
                    for (int j = 0; j < g.ntheta; ++j)
                        ind.set(ii, j, 0, u0(ii, j, 0) > tb ? 1.0 : 0.0);
                ScalarField lhs = symmetrize_set(ind);
                for (int ii = 0; ii < g.nr; ++ii)
                    for (int j = 0; j < g.ntheta; ++j)
                        CHECK(lhs(ii, j, 0) == (v(ii, j, 0) > tb ? 1.0 : 0.0));
            }
        }
    }

    SUBCASE("v is mu-distributed: distributions match at tol 0") {
        DistributionTable tv = distribution(v);
        CHECK(distributions_match(t, tv, 0.0));
        CHECK(distributions_match(t, t, 0.0));
    }

    SUBCASE("u vs 2u do not match") {
        ScalarField u2 = u0;
        for (double& x : u2.values()) x *= 2.0;
        CHECK_FALSE(distributions_match(t, distribution(u2), 1e-6));
    }
}

TEST_CASE("alpha field and mu csv") {
    ScalarField u = quadrant_field(16, 64);
    DistributionTable t = distribution(u);
    AlphaField a = make_alpha_field(t, 64);
    CHECK(a.nt == 64);
    for (int i = 0; i < 16; ++i)
        for (int l = 0; l < a.nt; ++l) {
            double al = a.at(i, 0, l);
            CHECK(al >= 0.0);
            CHECK(al <= kPi + 1e-12);
            // quadrant field: alpha = pi/2 for 0 <= t < 1
            double tv = a.t(l);
            if (tv > 0.0 && tv < 1.0) CHECK(al == doctest::Approx(kPi / 2.0).epsilon(1e-12));
        }

    std::ostringstream os;
    write_mu_csv(os, t);
    CHECK(os.str().substr(0, 16) == "r,y,t,mu,alpha\n0");
}

TEST_CASE("rearrange onto a finer angular lattice") {
    PolarGrid src(8, 32, 0, 0.0, 1.0);
    PolarGrid dst(8, 128, 0, 0.0, 1.0);
    ScalarField u0 = extend_by_zero(testutil::random_bump_field(src, 63));
    DistributionTable t = distribution(u0);
    ScalarField v = rearrange(t, dst);
    std::vector<int> order = rank_order(dst);
    for (int i = 0; i < dst.nr; ++i) {
        // general quantile: rank k gets inf{ t : mu(t) <= k r dtheta' };
        // the quota must round exactly as in the library (q times the unit)
        for (int q = 0; q < dst.ntheta; q += 11) {
            REQUIRE(v.inside(i, order[q], 0));
            double quota = q * (dst.r(i) * dst.dtheta());
            const SliceDistribution& s = t.slice(i, 0);
            double expect = s.thresholds.back();
            for (std::size_t l = 0; l < s.thresholds.size(); ++l)
                if (s.unit * s.count_above[l] <= quota) {
                    expect = s.thresholds[l];
                    break;
                }
            CHECK(v(i, order[q], 0) == expect);
        }
        // still non-increasing along the rank order
        for (int q = 0; q + 1 < dst.ntheta; ++q)
            CHECK(v(i, order[q], 0) >= v(i, order[q + 1], 0));
    }

    PolarGrid bad(9, 32, 0, 0.0, 1.0);
    CHECK_THROWS_AS(rearrange(t, bad), std::invalid_argument);
}
