#include "circsym/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "circsym/symmetrize.hpp"

namespace circsym {

namespace {

struct ContourPoint {
    double r, theta;
};

// Edge of the dual lattice of cell centers. kind 0: radial edge between
// (i,j) and (i+1,j); kind 1: angular edge between (i,j) and (i,j+1 mod).
struct EdgeId {
    int kind, i, j;
    bool operator<(const EdgeId& o) const {
        if (kind != o.kind) return kind < o.kind;
        if (i != o.i) return i < o.i;
        return j < o.j;
    }
};

struct Segment {
    EdgeId a, b;
    ContourPoint pa, pb;
};

double seg_length(const ContourPoint& a, const ContourPoint& b) {
    double dth = a.theta - b.theta;
    while (dth > kPi) dth -= 2.0 * kPi;
    while (dth < -kPi) dth += 2.0 * kPi;
    double rbar = 0.5 * (a.r + b.r);
    double dr = a.r - b.r;
    return std::sqrt(dr * dr + rbar * rbar * dth * dth);
}

// 3x3 box smoothing in the (r, theta) chart; a raw 0/1 field would give pure
// staircase contours (every crossing at the cell midpoint), while the 0.5
// level of the smoothed field tracks straight edges to sub-cell accuracy.
std::vector<double> smooth_indicator(const ScalarField& E) {
    const PolarGrid& g = E.grid();
    std::vector<double> out(static_cast<std::size_t>(g.nr) * g.ntheta, 0.0);
    auto raw = [&](int i, int j) { return E.inside(i, j, 0) && E(i, j, 0) == 1.0 ? 1.0 : 0.0; };
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j) {
            double s = 0.0;
            int cnt = 0;
            for (int di = -1; di <= 1; ++di) {
                int ii = i + di;
                if (ii < 0 || ii >= g.nr) continue;
                for (int dj = -1; dj <= 1; ++dj) {
                    s += raw(ii, (j + dj + g.ntheta) % g.ntheta);
                    ++cnt;
                }
            }
            out[static_cast<std::size_t>(i) * g.ntheta + j] = s / cnt;
        }
    return out;
}

// Marching squares over plaquettes of four adjacent cell centers; OUTSIDE
// counts as 0. Crossing points interpolate the 0.5 level linearly.
std::vector<Segment> trace_contour(const ScalarField& E) {
    const PolarGrid& g = E.grid();
    std::vector<double> sm = smooth_indicator(E);
    auto val = [&](int i, int j) { return sm[static_cast<std::size_t>(i) * g.ntheta + j]; };
    std::vector<Segment> segs;
    const double iso = 0.5;
    for (int i = 0; i + 1 < g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j) {
            int jp = (j + 1) % g.ntheta;
            double c00 = val(i, j), c10 = val(i + 1, j);
            double c01 = val(i, jp), c11 = val(i + 1, jp);
            int code = (c00 > iso) | ((c10 > iso) << 1) | ((c11 > iso) << 2) |
                       ((c01 > iso) << 3);
            if (code == 0 || code == 15) continue;

            auto cross = [iso](double a, double b) { return (iso - a) / (b - a); };
            // crossing points on the four plaquette edges
            ContourPoint pb{g.r(i) + g.dr() * cross(c00, c10), g.theta(j)};          // bottom
            ContourPoint pt{g.r(i) + g.dr() * cross(c01, c11), g.theta(j) + g.dtheta()};  // top
            ContourPoint pl{g.r(i), g.theta(j) + g.dtheta() * cross(c00, c01)};      // left
            ContourPoint pr{g.r(i + 1), g.theta(j) + g.dtheta() * cross(c10, c11)};  // right
            EdgeId eb{0, i, j}, et{0, i, jp}, el{1, i, j}, er{1, i + 1, j};

            auto emit = [&](EdgeId ea, ContourPoint a, EdgeId eb2, ContourPoint b) {
                segs.push_back({ea, eb2, a, b});
            };
            switch (code) {
                case 1: case 14: emit(eb, pb, el, pl); break;
                case 2: case 13: emit(eb, pb, er, pr); break;
                case 3: case 12: emit(el, pl, er, pr); break;
                case 4: case 11: emit(et, pt, er, pr); break;
                case 6: case 9:  emit(eb, pb, et, pt); break;
                case 7: case 8:  emit(et, pt, el, pl); break;
                case 5:  // saddle: the center average decides the pairing
                    if (0.25 * (c00 + c10 + c01 + c11) > iso) {
                        emit(eb, pb, er, pr);
                        emit(et, pt, el, pl);
                    } else {
                        emit(eb, pb, el, pl);
                        emit(et, pt, er, pr);
                    }
                    break;
                case 10:
                    if (0.25 * (c00 + c10 + c01 + c11) > iso) {
                        emit(eb, pb, el, pl);
                        emit(et, pt, er, pr);
                    } else {
                        emit(eb, pb, er, pr);
                        emit(et, pt, el, pl);
                    }
                    break;
            }
        }
    return segs;
}

}  // namespace

PerimeterEstimate set_perimeter(const ScalarField& E, const Window& w) {
    const PolarGrid& g = E.grid();
    if (g.ny > 0) throw std::invalid_argument("set_perimeter: only planar sets (ny == 0)");
    if (!E.is_indicator()) throw std::invalid_argument("set_perimeter: field is not an indicator");

    std::vector<Segment> segs = trace_contour(E);

    // stitch segments into connected components through shared edges
    std::map<EdgeId, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge[segs[s].a].push_back(s);
        by_edge[segs[s].b].push_back(s);
    }
    std::vector<int> comp(segs.size(), -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<std::size_t> stack{s};
        comp[s] = ncomp;
        while (!stack.empty()) {
            std::size_t cur = stack.back();
            stack.pop_back();
            for (const EdgeId& e : {segs[cur].a, segs[cur].b})
                for (std::size_t nb : by_edge[e])
                    if (comp[nb] < 0) {
                        comp[nb] = ncomp;
                        stack.push_back(nb);
                    }
        }
        ++ncomp;
    }

    PerimeterEstimate est;
    std::vector<double> lengths(ncomp, 0.0);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        double rbar = 0.5 * (segs[s].pa.r + segs[s].pb.r);
        if (rbar < w.r0 || rbar > w.r1) continue;
        double len = seg_length(segs[s].pa, segs[s].pb);
        lengths[comp[s]] += len;
        est.total += len;
    }
    for (double l : lengths)
        if (l > 0.0) est.component_lengths.push_back(l);
    std::sort(est.component_lengths.rbegin(), est.component_lengths.rend());
    return est;
}

double disc_calibration_error(const PolarGrid& g) {
    double err = 0.0;
    // centered discs probe grid-aligned contours only; offset discs sweep all
    // boundary orientations in the (r, theta) chart
    for (double frac : {0.35, 0.55, 0.75}) {
        double rho = g.rmin + frac * (g.rmax - g.rmin);
        if (rho <= g.rmin) continue;
        ScalarField disc(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) disc.set(i, j, 0, g.r(i) < rho ? 1.0 : 0.0);
        double p = set_perimeter(disc, Window::full()).total;
        err = std::max(err, std::fabs(p - 2.0 * kPi * rho) / (2.0 * kPi * rho));
    }
    for (double off_frac : {0.3, 0.45}) {
        double rho = 0.35 * (g.rmax - g.rmin);
        double off = g.rmin + off_frac * (g.rmax - g.rmin);
        ScalarField disc(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                double x = g.r(i) * std::cos(g.theta(j));
                double y = g.r(i) * std::sin(g.theta(j));
                disc.set(i, j, 0, std::hypot(x - off, y) < rho ? 1.0 : 0.0);
            }
        double p = set_perimeter(disc, Window::full()).total;
        err = std::max(err, std::fabs(p - 2.0 * kPi * rho) / (2.0 * kPi * rho));
    }
    return std::max(err, 1e-12);
}

PerimeterCheck check_perimeter_inequality(const ScalarField& E,
                                          const std::vector<Window>& windows, double tol) {
    ScalarField Es = symmetrize_set(E);
    const PolarGrid& g = E.grid();
    double cal = tol < 0.0 ? disc_calibration_error(g) : 0.0;
    // contour positions are resolved no better than a cell, so each window
    // carries an absolute error floor of one cell diagonal besides the
    // calibrated relative error
    double diag = std::hypot(g.dr(), g.rmax * g.dtheta());
    PerimeterCheck out;
    for (const Window& w : windows) {
        PerimeterWindowResult res;
        res.window = w;
        PerimeterEstimate pe = set_perimeter(E, w);
        PerimeterEstimate ps = set_perimeter(Es, w);
        res.p_set = pe.total;
        res.p_sym = ps.total;
        res.arcs_set = pe.component_lengths;
        res.arcs_sym = ps.component_lengths;
        res.tol = tol >= 0.0 ? tol : 3.0 * (cal * std::max(pe.total, ps.total) + diag);
        res.holds = ps.total <= pe.total + res.tol;
        out.all_hold = out.all_hold && res.holds;
        out.windows.push_back(std::move(res));
    }
    return out;
}

double subgraph_perimeter(const ScalarField& u, const Window& w) {
    const PolarGrid& g = u.grid();
    GradientField grad = gradient(u);
    bool any = false;
    double total = 0.0;
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            if (!w.contains_slice(g, i, k)) continue;
            any = true;
            double cm = g.cell_measure(i);
            for (int j = 0; j < g.ntheta; ++j) {
                std::size_t n = g.index(i, j, k);
                if (!grad.defined[n])
                    throw std::domain_error("subgraph_perimeter: OUTSIDE cell inside the window");
                if (!w.contains_value(u(i, j, k))) continue;
                total += std::sqrt(1.0 + grad.norm2(n)) * cm;
            }
        }
    if (!any) throw empty_window_error("subgraph_perimeter: window disjoint from the grid");
    return total;
}

int slice_endpoint_count(const ScalarField& E, int i, int k) {
    const PolarGrid& g = E.grid();
    int count = 0;
    for (int j = 0; j < g.ntheta; ++j) {
        int jp = (j + 1) % g.ntheta;
        bool a = E.inside(i, j, k) && E(i, j, k) == 1.0;
        bool b = E.inside(i, jp, k) && E(i, jp, k) == 1.0;
        if (a != b) ++count;
    }
    return count;
}

void write_perimeter_csv(std::ostream& os, const PerimeterCheck& check) {
    os << "r0,r1,p_set,p_sym,margin\n";
    char buf[200];
    for (const auto& res : check.windows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", res.window.r0,
                      res.window.r1, res.p_set, res.p_sym, res.p_set - res.p_sym);
        os << buf;
    }
}

}  // namespace circsym
