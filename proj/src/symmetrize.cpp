#include "circsym/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace circsym {

int SliceDistribution::count_gt(double t) const {
    if (!covered || thresholds.empty()) return 0;
    // last threshold <= t; right-continuity: at t == thresholds[l] the count
    // drops to count_above[l]
    auto it = std::upper_bound(thresholds.begin(), thresholds.end(), t);
    if (it == thresholds.begin()) return count_total;
    return count_above[static_cast<std::size_t>(it - thresholds.begin()) - 1];
}

double DistributionTable::min_threshold() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : slices)
        if (s.covered && !s.thresholds.empty()) m = std::min(m, s.thresholds.front());
    if (!std::isfinite(m)) throw empty_domain_error("distribution table has no covered slice");
    return m;
}

double DistributionTable::max_threshold() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : slices)
        if (s.covered && !s.thresholds.empty()) m = std::max(m, s.thresholds.back());
    if (!std::isfinite(m)) throw empty_domain_error("distribution table has no covered slice");
    return m;
}

double slice_arc_measure(const ScalarField& u, int i, int k, double t) {
    const PolarGrid& g = u.grid();
    int inside_cnt = 0;
    for (int j = 0; j < g.ntheta; ++j)
        if (u.inside(i, j, k)) ++inside_cnt;
    if (inside_cnt == 0) throw std::domain_error("slice_arc_measure: EMPTY slice");

    double r = g.r(i);
    if (inside_cnt < g.ntheta) {
        // partial slice: exact cell counting over the covered cells
        int cnt = 0;
        for (int j = 0; j < g.ntheta; ++j)
            if (u.inside(i, j, k) && u(i, j, k) > t) ++cnt;
        return cnt * r * g.dtheta();
    }

    // piecewise linear in theta between cell centers, periodic
    double angle = 0.0;
    for (int j = 0; j < g.ntheta; ++j) {
        double a = u(i, j, k), b = u(i, (j + 1) % g.ntheta, k);
        bool pa = a > t, pb = b > t;
        if (pa && pb) {
            angle += 1.0;
        } else if (pa != pb) {
            angle += std::fabs(a - t) / std::fabs(a - b);
        }
    }
    return angle * g.dtheta() * r;
}

namespace {

SliceDistribution build_slice(std::vector<double>& samples, double unit) {
    SliceDistribution s;
    s.unit = unit;
    s.count_total = static_cast<int>(samples.size());
    s.covered = !samples.empty();
    if (!s.covered) return s;
    std::sort(samples.begin(), samples.end());
    int n = s.count_total;
    for (int a = 0; a < n;) {
        int b = a;
        while (b < n && samples[b] == samples[a]) ++b;
        s.thresholds.push_back(samples[a]);
        s.count_above.push_back(n - b);
        a = b;
    }
    return s;
}

}  // namespace

DistributionTable distribution(const ScalarField& u0) {
    const PolarGrid& g = u0.grid();
    DistributionTable t;
    t.grid = g;
    t.slices.resize(static_cast<std::size_t>(g.nr) * g.ny_eff());
    std::vector<double> samples;
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            samples.clear();
            int cnt = 0;
            for (int j = 0; j < g.ntheta; ++j)
                if (u0.inside(i, j, k)) {
                    samples.push_back(u0(i, j, k));
                    ++cnt;
                }
            if (cnt != 0 && cnt != g.ntheta)
                throw std::invalid_argument(
                    "distribution: input is not a zero-extension (mixed slice); "
                    "use restricted_distribution for raw domains");
            t.slices[g.slice_index(i, k)] = build_slice(samples, g.r(i) * g.dtheta());
        }
    return t;
}

DistributionTable restricted_distribution(const ScalarField& u) {
    const PolarGrid& g = u.grid();
    DistributionTable t;
    t.grid = g;
    t.slices.resize(static_cast<std::size_t>(g.nr) * g.ny_eff());
    std::vector<double> samples;
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            samples.clear();
            for (int j = 0; j < g.ntheta; ++j)
                if (u.inside(i, j, k)) samples.push_back(u(i, j, k));
            t.slices[g.slice_index(i, k)] = build_slice(samples, g.r(i) * g.dtheta());
        }
    return t;
}

std::vector<int> rank_order(const PolarGrid& g) {
    // theta_j is proportional to the integer 2j+1-ntheta, so the (|theta|
    // ascending, positive first) order is exact in integer arithmetic
    std::vector<int> order(g.ntheta);
    for (int j = 0; j < g.ntheta; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        int da = 2 * a + 1 - g.ntheta, db = 2 * b + 1 - g.ntheta;
        int fa = std::abs(da), fb = std::abs(db);
        if (fa != fb) return fa < fb;
        return da > db;
    });
    return order;
}

ScalarField rearrange(const DistributionTable& table, const PolarGrid& target) {
    if (!table.grid.same_slice_lattice(target))
        throw std::invalid_argument("rearrange: table does not cover the target (r, y) lattice");
    ScalarField v(target);
    std::vector<int> order = rank_order(target);
    const bool same_theta = table.grid.ntheta == target.ntheta;

    for (int k = 0; k < target.ny_eff(); ++k)
        for (int i = 0; i < target.nr; ++i) {
            const SliceDistribution& s = table.slice(i, k);
            if (!s.covered) continue;  // EMPTY slice stays OUTSIDE
            const int m = static_cast<int>(s.thresholds.size());
            if (same_theta) {
                // rank q gets the smallest threshold with count_above <= q,
                // i.e. the (q+1)-th largest sample
                int q = 0;
                for (int l = m - 1; l >= 0 && q < s.count_total; --l) {
                    int upto = (l == 0) ? s.count_total : s.count_above[l - 1];
                    for (; q < upto; ++q) v.set(i, order[q], k, s.thresholds[l]);
                }
            } else {
                double unit_q = target.r(i) * target.dtheta();
                double below = s.unit * s.count_total;
                for (int q = 0; q < target.ntheta; ++q) {
                    double quota = q * unit_q;
                    if (below <= quota) break;  // this and later ranks are outside
                    // smallest threshold index with mu <= quota
                    int lo = 0, hi = m - 1;
                    while (lo < hi) {
                        int mid = (lo + hi) / 2;
                        if (s.unit * s.count_above[mid] <= quota)
                            hi = mid;
                        else
                            lo = mid + 1;
                    }
                    v.set(i, order[q], k, s.thresholds[lo]);
                }
            }
        }
    return v;
}

ScalarField symmetrize_set(const ScalarField& E) {
    if (!E.is_indicator())
        throw std::invalid_argument("symmetrize_set: field is not an indicator");
    const PolarGrid& g = E.grid();
    ScalarField out(g);
    std::vector<int> order = rank_order(g);
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            int numeric = 0, ones = 0;
            for (int j = 0; j < g.ntheta; ++j)
                if (E.inside(i, j, k)) {
                    ++numeric;
                    if (E(i, j, k) == 1.0) ++ones;
                }
            if (numeric == 0) continue;  // empty slice of the set
            for (int q = 0; q < g.ntheta; ++q)
                out.set(i, order[q], k, q < ones ? 1.0 : 0.0);
        }
    return out;
}

double distribution_l1_distance(const DistributionTable& a, const DistributionTable& b) {
    if (!a.grid.same_slice_lattice(b.grid))
        throw std::invalid_argument("distribution distance: (r, y) lattices differ");
    const PolarGrid& g = a.grid;
    double dy = g.ny > 0 ? g.dy() : 1.0;
    double total = 0.0;
    for (std::size_t n = 0; n < a.slices.size(); ++n) {
        const SliceDistribution& sa = a.slices[n];
        const SliceDistribution& sb = b.slices[n];
        double tail_a = sa.unit * sa.count_total;
        double tail_b = sb.unit * sb.count_total;
        if (tail_a != tail_b) return std::numeric_limits<double>::infinity();
        if (!sa.covered && !sb.covered) continue;
        // integrate |mu_a - mu_b| over the union of breakpoints
        std::vector<double> ts;
        ts.reserve(sa.thresholds.size() + sb.thresholds.size());
        ts.insert(ts.end(), sa.thresholds.begin(), sa.thresholds.end());
        ts.insert(ts.end(), sb.thresholds.begin(), sb.thresholds.end());
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        double acc = 0.0;
        for (std::size_t l = 0; l + 1 < ts.size(); ++l)
            acc += std::fabs(sa.mu(ts[l]) - sb.mu(ts[l])) * (ts[l + 1] - ts[l]);
        total += acc * g.dr() * dy;
    }
    return total;
}

bool distributions_match(const DistributionTable& a, const DistributionTable& b, double tol) {
    return distribution_l1_distance(a, b) <= tol;
}

AlphaField make_alpha_field(const DistributionTable& table, int nt) {
    const PolarGrid& g = table.grid;
    AlphaField a;
    a.grid = g;
    a.tmin = table.min_threshold();
    a.tmax = table.max_threshold();
    if (a.tmax <= a.tmin) {
        a.tmin -= 0.5;
        a.tmax += 0.5;
    }
    if (nt <= 0) {
        double want = (a.tmax - a.tmin) / g.dr();
        nt = static_cast<int>(std::llround(std::clamp(want, 32.0, 512.0)));
    }
    a.nt = nt;
    a.alpha.assign(static_cast<std::size_t>(g.nr) * g.ny_eff() * nt, 0.0);
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            const SliceDistribution& s = table.slice(i, k);
            if (!s.covered) continue;
            double inv2r = 1.0 / (2.0 * g.r(i));
            for (int l = 0; l < nt; ++l)
                a.alpha[a.index(i, k, l)] = s.mu(a.t(l)) * inv2r;
        }
    return a;
}

void write_mu_csv(std::ostream& os, const DistributionTable& table) {
    const PolarGrid& g = table.grid;
    os << "r,y,t,mu,alpha\n";
    char buf[200];
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            const SliceDistribution& s = table.slice(i, k);
            if (!s.covered) continue;
            double r = g.r(i), y = g.y(k);
            for (std::size_t l = 0; l < s.thresholds.size(); ++l) {
                double mu = s.unit * s.count_above[l];
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r, y,
                              s.thresholds[l], mu, mu / (2.0 * r));
                os << buf;
            }
        }
}

}  // namespace circsym
