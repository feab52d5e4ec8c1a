#include "circsym/rigidity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>

#include "json.hpp"

#include "circsym/parallel.hpp"

namespace circsym {

DirectionField direction_field(const ScalarField& u0, const DistributionTable& table,
                               int nt, double eps) {
    const PolarGrid& g = u0.grid();
    if (!g.same_lattice(table.grid))
        throw std::invalid_argument("direction_field: table was not built from this field");
    DirectionField out;
    out.base = make_alpha_field(table, nt);
    out.eps = eps > 0.0 ? eps : g.dtheta();
    std::size_t n = out.base.alpha.size();
    out.dx.assign(n, 1.0);
    out.dy.assign(n, 0.0);
    out.defined.assign(n, 0);

    const int ntheta = g.ntheta;
    const double dth = g.dtheta();

    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            const SliceDistribution& s = table.slice(i, k);
            if (!s.covered) continue;
            for (int l = 0; l < out.base.nt; ++l) {
                double alpha = out.base.at(i, k, l);
                if (alpha <= out.eps || alpha >= kPi - out.eps) continue;
                double t = out.base.t(l);
                // integrate x-hat over the superlevel arcs, with piecewise
                // linear crossing ends: arc [a,b] contributes
                // (sin b - sin a, cos a - cos b)
                double sx = 0.0, sy = 0.0;
                for (int j = 0; j < ntheta; ++j) {
                    double va = u0(i, j, k) - t;
                    if (va <= 0.0) continue;
                    double lo = g.theta(j) - 0.5 * dth;
                    double hi = g.theta(j) + 0.5 * dth;
                    int jm = (j + ntheta - 1) % ntheta;
                    int jp = (j + 1) % ntheta;
                    double vm = u0(i, jm, k) - t;
                    double vp = u0(i, jp, k) - t;
                    // shift the cell ends toward the interpolated crossings
                    if (vm <= 0.0) lo = g.theta(j) - dth * va / (va - vm) ;
                    if (vp <= 0.0) hi = g.theta(j) + dth * va / (va - vp);
                    sx += std::sin(hi) - std::sin(lo);
                    sy += std::cos(lo) - std::cos(hi);
                }
                double norm = std::hypot(sx, sy);
                std::size_t idx = out.base.index(i, k, l);
                if (norm > 1e-12) {
                    out.dx[idx] = sx / norm;
                    out.dy[idx] = sy / norm;
                    out.defined[idx] = 1;
                }
            }
        }
    return out;
}

namespace {

struct LatticeGeom {
    int nr, nyy, nt;
    std::size_t idx(int i, int k, int l) const {
        return (static_cast<std::size_t>(k) * nr + i) * nt + l;
    }
};

}  // namespace

AlphaLandscape classify_landscape(const AlphaField& alpha, double eps, double kappa,
                                  double min_area) {
    AlphaLandscape out;
    out.alpha = alpha;
    out.eps = eps;
    const PolarGrid& g = alpha.grid;
    LatticeGeom L{g.nr, g.ny_eff(), alpha.nt};
    const double cellm = alpha.cell_measure();
    if (min_area <= 0.0) min_area = 10.0 * cellm;
    out.min_area = min_area;

    std::size_t n = alpha.alpha.size();
    out.cls.assign(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        double a = alpha.alpha[c];
        out.cls[c] = a <= eps ? 0 : (a >= kPi - eps ? 2 : 1);
    }

    // faces along axes 0:r, 1:t, 2:y; a face is addressed by its low cell
    auto face_count = [&](int axis) {
        return axis == 0 ? static_cast<std::size_t>(L.nr - 1) * L.nyy * L.nt
             : axis == 1 ? static_cast<std::size_t>(L.nr) * L.nyy * (L.nt - 1)
                         : (L.nyy > 1 ? static_cast<std::size_t>(L.nr) * (L.nyy - 1) * L.nt : 0);
    };
    auto neighbor = [&](int axis, int i, int k, int l) {
        if (axis == 0) return L.idx(i + 1, k, l);
        if (axis == 1) return L.idx(i, k, l + 1);
        return L.idx(i, k + 1, l);
    };

    // kappa: 10x the median inter-cell |dalpha| on MID-MID faces
    if (kappa <= 0.0) {
        std::vector<double> jumps;
        for (int axis = 0; axis < 3; ++axis) {
            if (face_count(axis) == 0) continue;
            for (int k = 0; k < L.nyy - (axis == 2 ? 1 : 0); ++k)
                for (int i = 0; i < L.nr - (axis == 0 ? 1 : 0); ++i)
                    for (int l = 0; l < L.nt - (axis == 1 ? 1 : 0); ++l) {
                        std::size_t a = L.idx(i, k, l), b = neighbor(axis, i, k, l);
                        if (out.cls[a] == 1 && out.cls[b] == 1)
                            jumps.push_back(std::fabs(alpha.alpha[a] - alpha.alpha[b]));
                    }
        }
        if (jumps.empty()) {
            kappa = std::numeric_limits<double>::infinity();
        } else {
            std::nth_element(jumps.begin(), jumps.begin() + jumps.size() / 2, jumps.end());
            kappa = 10.0 * std::max(jumps[jumps.size() / 2], 1e-12);
        }
    }
    out.kappa = kappa;

    // cut[axis] marks faces removed from MID connectivity
    std::vector<std::vector<std::uint8_t>> cut(3);
    for (int axis = 0; axis < 3; ++axis) cut[axis].assign(face_count(axis), 0);
    auto face_id = [&](int axis, int i, int k, int l) -> std::size_t {
        if (axis == 0) return (static_cast<std::size_t>(k) * (L.nr - 1) + i) * L.nt + l;
        if (axis == 1) return (static_cast<std::size_t>(k) * L.nr + i) * (L.nt - 1) + l;
        return (static_cast<std::size_t>(k) * L.nr + i) * L.nt + l;
    };
    for (int axis = 0; axis < 3; ++axis) {
        if (face_count(axis) == 0) continue;
        for (int k = 0; k < L.nyy - (axis == 2 ? 1 : 0); ++k)
            for (int i = 0; i < L.nr - (axis == 0 ? 1 : 0); ++i)
                for (int l = 0; l < L.nt - (axis == 1 ? 1 : 0); ++l) {
                    std::size_t a = L.idx(i, k, l), b = neighbor(axis, i, k, l);
                    if (out.cls[a] != 1 || out.cls[b] != 1) continue;
                    if (std::fabs(alpha.alpha[a] - alpha.alpha[b]) > kappa) {
                        cut[axis][face_id(axis, i, k, l)] = 1;
                        ++out.singular_faces;
                    }
                }
    }

    auto relabel = [&]() {
        out.label.assign(n, -1);
        int next = 0;
        for (int k0 = 0; k0 < L.nyy; ++k0)
            for (int i0 = 0; i0 < L.nr; ++i0)
                for (int l0 = 0; l0 < L.nt; ++l0) {
                    std::size_t seed = L.idx(i0, k0, l0);
                    if (out.cls[seed] != 1 || out.label[seed] >= 0) continue;
                    std::queue<std::array<int, 3>> q;
                    q.push({i0, k0, l0});
                    out.label[seed] = next;
                    while (!q.empty()) {
                        auto [i, k, l] = q.front();
                        q.pop();
                        auto visit = [&](int ii, int kk, int ll, int axis, int fi, int fk, int fl) {
                            if (ii < 0 || ii >= L.nr || kk < 0 || kk >= L.nyy || ll < 0 ||
                                ll >= L.nt)
                                return;
                            std::size_t c = L.idx(ii, kk, ll);
                            if (out.cls[c] != 1 || out.label[c] >= 0) return;
                            if (cut[axis][face_id(axis, fi, fk, fl)]) return;
                            out.label[c] = next;
                            q.push({ii, kk, ll});
                        };
                        visit(i - 1, k, l, 0, i - 1, k, l);
                        visit(i + 1, k, l, 0, i, k, l);
                        visit(i, k, l - 1, 1, i, k, l - 1);
                        visit(i, k, l + 1, 1, i, k, l);
                        if (L.nyy > 1) {
                            visit(i, k - 1, l, 2, i, k - 1, l);
                            visit(i, k + 1, l, 2, i, k, l);
                        }
                    }
                    ++next;
                }
        return next;
    };

    int ncomp = relabel();

    // neck cuts: a component crossing an axis-aligned boundary through at
    // most neck_max faces, with both sides of honest size, is a pinch
    const int neck_max = 2;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int comp = 0; comp < ncomp && !changed; ++comp) {
            for (int axis = 0; axis < 3 && !changed; ++axis) {
                if (face_count(axis) == 0) continue;
                int planes = axis == 0 ? L.nr - 1 : axis == 1 ? L.nt - 1 : L.nyy - 1;
                for (int p = 0; p < planes && !changed; ++p) {
                    // collect this component's uncut faces on plane p
                    std::vector<std::array<int, 3>> faces;
                    for (int k = 0; k < (axis == 2 ? 1 : L.nyy); ++k)
                        for (int i = 0; i < (axis == 0 ? 1 : L.nr); ++i)
                            for (int l = 0; l < (axis == 1 ? 1 : L.nt); ++l) {
                                int fi = axis == 0 ? p : i;
                                int fk = axis == 2 ? p : k;
                                int fl = axis == 1 ? p : l;
                                std::size_t a = L.idx(fi, fk, fl);
                                std::size_t b = neighbor(axis, fi, fk, fl);
                                if (out.label[a] != comp || out.label[b] != comp) continue;
                                if (cut[axis][face_id(axis, fi, fk, fl)]) continue;
                                faces.push_back({fi, fk, fl});
                                if (static_cast<int>(faces.size()) > neck_max) break;
                            }
                    if (faces.empty() || static_cast<int>(faces.size()) > neck_max) continue;

                    // try the cut: flood from the low side without crossing
                    for (auto& f : faces) cut[axis][face_id(axis, f[0], f[1], f[2])] = 1;
                    std::vector<std::uint8_t> side(n, 0);
                    std::queue<std::array<int, 3>> q;
                    {
                        auto [fi, fk, fl] = faces[0];
                        q.push({fi, fk, fl});
                        side[L.idx(fi, fk, fl)] = 1;
                    }
                    double low_measure = 0.0;
                    double comp_measure = 0.0;
                    for (std::size_t c = 0; c < n; ++c)
                        if (out.label[c] == comp) comp_measure += cellm;
                    while (!q.empty()) {
                        auto [i, k, l] = q.front();
                        q.pop();
                        low_measure += cellm;
                        auto visit = [&](int ii, int kk, int ll, int ax, int fi, int fk, int fl) {
                            if (ii < 0 || ii >= L.nr || kk < 0 || kk >= L.nyy || ll < 0 ||
                                ll >= L.nt)
                                return;
                            std::size_t c = L.idx(ii, kk, ll);
                            if (out.label[c] != comp || side[c]) return;
                            if (cut[ax][face_id(ax, fi, fk, fl)]) return;
                            side[c] = 1;
                            q.push({ii, kk, ll});
                        };
                        visit(i - 1, k, l, 0, i - 1, k, l);
                        visit(i + 1, k, l, 0, i, k, l);
                        visit(i, k, l - 1, 1, i, k, l - 1);
                        visit(i, k, l + 1, 1, i, k, l);
                        if (L.nyy > 1) {
                            visit(i, k - 1, l, 2, i, k - 1, l);
                            visit(i, k + 1, l, 2, i, k, l);
                        }
                    }
                    double high_measure = comp_measure - low_measure;
                    if (low_measure >= min_area && high_measure >= min_area) {
                        Pinch pinch;
                        pinch.faces = static_cast<int>(faces.size());
                        double racc = 0.0, tacc = 0.0, yacc = 0.0;
                        for (auto& f : faces) {
                            racc += axis == 0 ? g.rmin + (f[0] + 1) * g.dr() : g.r(f[0]);
                            tacc += axis == 1 ? alpha.tmin + (f[2] + 1) * alpha.dt()
                                              : alpha.t(f[2]);
                            yacc += axis == 2 ? g.ymin + (f[1] + 1) * g.dy() : g.y(f[1]);
                        }
                        pinch.r = racc / faces.size();
                        pinch.t = tacc / faces.size();
                        pinch.y = yacc / faces.size();
                        out.pinches.push_back(pinch);
                        ncomp = relabel();
                        changed = true;
                    } else {
                        for (auto& f : faces)
                            cut[axis][face_id(axis, f[0], f[1], f[2])] = 0;  // revert
                    }
                }
            }
        }
    }

    // gather components, fold the small ones into the inconclusive mass
    std::vector<double> measure(ncomp, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        if (out.label[c] >= 0) measure[out.label[c]] += cellm;
    std::vector<int> remap(ncomp, -2);
    for (int c = 0; c < ncomp; ++c) {
        if (measure[c] > min_area) {
            remap[c] = static_cast<int>(out.components.size());
            LandscapeComponent lc;
            lc.measure = measure[c];
            out.components.push_back(std::move(lc));
        } else {
            out.inconclusive_measure += measure[c];
        }
    }
    for (std::size_t c = 0; c < n; ++c)
        if (out.label[c] >= 0) {
            int m = remap[out.label[c]];
            out.label[c] = m;
            if (m >= 0) out.components[m].cells.push_back(c);
        }
    // components sorted by measure, largest first
    std::vector<int> order(out.components.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return out.components[a].measure > out.components[b].measure;
    });
    std::vector<LandscapeComponent> sorted;
    std::vector<int> inv(order.size());
    for (std::size_t c = 0; c < order.size(); ++c) {
        inv[order[c]] = static_cast<int>(c);
        sorted.push_back(std::move(out.components[order[c]]));
    }
    out.components = std::move(sorted);
    for (std::size_t c = 0; c < n; ++c)
        if (out.label[c] >= 0) out.label[c] = inv[out.label[c]];

    // near-contact pinches: distinct components separated along an axis by one
    // or two LOW cells; a short run of such loci on one lattice plane marks a
    // sub-cell neck the classes already resolved
    std::map<std::pair<int, int>, std::vector<std::array<double, 3>>> contacts;
    auto cell_at = [&](int axis, int base, int step, int i, int k, int l) {
        int ii = i + (axis == 0 ? base + step : 0);
        int kk = k + (axis == 2 ? base + step : 0);
        int ll = l + (axis == 1 ? base + step : 0);
        return std::array<int, 3>{ii, kk, ll};
    };
    for (int axis = 0; axis < 3; ++axis) {
        if (axis == 2 && L.nyy == 1) continue;
        int extent = axis == 0 ? L.nr : axis == 1 ? L.nt : L.nyy;
        for (int gap = 1; gap <= 2; ++gap)
            for (int k = 0; k < L.nyy; ++k)
                for (int i = 0; i < L.nr; ++i)
                    for (int l = 0; l < L.nt; ++l) {
                        int pos = axis == 0 ? i : axis == 1 ? l : k;
                        if (pos + gap + 1 >= extent) continue;
                        auto far = cell_at(axis, gap + 1, 0, i, k, l);
                        int la = out.label[L.idx(i, k, l)];
                        int lb = out.label[L.idx(far[0], far[1], far[2])];
                        if (la < 0 || lb < 0 || la == lb) continue;
                        bool low_between = true;
                        for (int m = 1; m <= gap; ++m) {
                            auto mid = cell_at(axis, m, 0, i, k, l);
                            if (out.cls[L.idx(mid[0], mid[1], mid[2])] != 0) low_between = false;
                        }
                        if (!low_between) continue;
                        double rc = 0.5 * (g.r(i) + g.r(far[0]));
                        double tc = 0.5 * (alpha.t(l) + alpha.t(far[2]));
                        double yc = 0.5 * (g.y(k) + g.y(far[1]));
                        contacts[{axis, pos}].push_back({rc, yc, tc});
                    }
    }
    for (const auto& [key, loci] : contacts) {
        if (loci.size() > 4) continue;  // a long valley, not a point pinch
        Pinch p;
        for (const auto& c : loci) {
            p.r += c[0] / loci.size();
            p.y += c[1] / loci.size();
            p.t += c[2] / loci.size();
        }
        p.faces = static_cast<int>(loci.size());
        out.pinches.push_back(p);
    }
    return out;
}

OrthogonalFit fit_orthogonal(const ScalarField& u, const ScalarField& v) {
    const PolarGrid& g = u.grid();
    if (!g.same_lattice(v.grid()))
        throw std::invalid_argument("fit_orthogonal: fields live on different grids");

    double norm_v = 0.0;
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            double cm = g.cell_measure(i);
            for (int j = 0; j < g.ntheta; ++j)
                if (v.inside(i, j, k)) norm_v += std::fabs(v(i, j, k)) * cm;
        }
    if (norm_v <= 0.0) throw degenerate_norm_error("fit_orthogonal: ||v||_1 = 0");

    const int nth = g.ntheta;
    const int rows = g.ny_eff() * g.nr;

    // per-row precomputation; on rows fully covered by both fields,
    // sum |u - v| = sum |v| + sum over supp(u) of (|u - v| - |v|)
    std::vector<std::uint8_t> dense(rows, 0);
    std::vector<double> const_v(rows, 0.0);
    std::vector<std::vector<int>> supp(rows);
    for (int row = 0; row < rows; ++row) {
        int k = row / g.nr, i = row % g.nr;
        bool all = true;
        double sv = 0.0;
        for (int j = 0; j < nth; ++j) {
            if (!u.inside(i, j, k) || !v.inside(i, j, k)) all = false;
            if (v.inside(i, j, k)) sv += std::fabs(v(i, j, k));
        }
        dense[row] = all;
        const_v[row] = sv;
        if (all)
            for (int j = 0; j < nth; ++j)
                if (u(i, j, k) != 0.0) supp[row].push_back(j);
    }

    // residual of u against v composed with (reflect?, shift by s cells)
    auto cell_residual = [&](int s, bool reflect) {
        double acc = 0.0;
        for (int row = 0; row < rows; ++row) {
            int k = row / g.nr, i = row % g.nr;
            double cm = g.cell_measure(i);
            double racc;
            if (dense[row]) {
                racc = const_v[row];
                for (int j : supp[row]) {
                    int jm = reflect ? (nth - 1 - j + s) % nth : (j + s) % nth;
                    double b = v(i, jm, k);
                    racc += std::fabs(u(i, j, k) - b) - std::fabs(b);
                }
            } else {
                racc = 0.0;
                for (int j = 0; j < nth; ++j) {
                    int jm = reflect ? (nth - 1 - j + s) % nth : (j + s) % nth;
                    bool iu = u.inside(i, j, k), iv = v.inside(i, jm, k);
                    if (!iu && !iv) continue;
                    double a = iu ? u(i, j, k) : 0.0;
                    double b = iv ? v(i, jm, k) : 0.0;
                    racc += std::fabs(a - b);
                }
            }
            acc += racc * cm;
        }
        return acc;
    };

    std::vector<double> res_id(nth), res_rf(nth);
    chunked_for(nth, [&](int, long long b, long long e) {
        for (long long s = b; s < e; ++s) {
            res_id[s] = cell_residual(static_cast<int>(s), false);
            res_rf[s] = cell_residual(static_cast<int>(s), true);
        }
    });
    int best_s = 0;
    bool best_rf = false;
    double best = res_id[0];
    for (int s = 0; s < nth; ++s) {
        if (res_id[s] < best) { best = res_id[s]; best_s = s; best_rf = false; }
        if (res_rf[s] < best) { best = res_rf[s]; best_s = s; best_rf = true; }
    }

    // sub-cell refinement with linear interpolation of v in theta; parallel
    // over rows with a fixed-order reduction so the result is worker-invariant
    std::vector<double> row_acc(rows, 0.0);
    auto interp_residual = [&](double phi, bool reflect) {
        const double dth = g.dtheta();
        chunked_for(rows, [&](int, long long rb, long long re) {
            for (long long row = rb; row < re; ++row) {
                int k = static_cast<int>(row) / g.nr, i = static_cast<int>(row) % g.nr;
                double cm = g.cell_measure(i);
                double acc = 0.0;
                for (int j = 0; j < nth; ++j) {
                    double th = g.theta(j);
                    double target = reflect ? -th + phi : th + phi;
                    double pos = (target + kPi) / dth - 0.5;
                    double fl = std::floor(pos);
                    double frac = pos - fl;
                    int j0 = static_cast<int>(fl) % nth;
                    if (j0 < 0) j0 += nth;
                    int j1 = (j0 + 1) % nth;
                    bool iu = u.inside(i, j, k);
                    bool i0 = v.inside(i, j0, k), i1 = v.inside(i, j1, k);
                    double b;
                    if (i0 && i1)
                        b = (1.0 - frac) * v(i, j0, k) + frac * v(i, j1, k);
                    else if (i0 || i1)
                        b = i0 ? v(i, j0, k) : v(i, j1, k);
                    else if (iu)
                        b = 0.0;
                    else
                        continue;
                    double a = iu ? u(i, j, k) : 0.0;
                    acc += std::fabs(a - b);
                }
                row_acc[row] = acc * cm;
            }
        });
        double total = 0.0;
        for (int row = 0; row < rows; ++row) total += row_acc[row];
        return total;
    };

    // cell shift to angle: theta_{(n-1-j+s) mod n} = -theta_j + s dtheta and
    // theta_{(j+s) mod n} = theta_j + s dtheta, so phi = s dtheta either way
    double phi0 = best_s * g.dtheta();
    double lo = phi0 - g.dtheta(), hi = phi0 + g.dtheta();
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = interp_residual(x1, best_rf), f2 = interp_residual(x2, best_rf);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = interp_residual(x1, best_rf);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = interp_residual(x2, best_rf);
        }
    }
    double phi = f1 < f2 ? x1 : x2;
    double fref = std::min(f1, f2);
    if (best < fref) {  // whole-cell optimum was already best
        phi = phi0;
        fref = best;
    }
    while (phi >= kPi) phi -= 2.0 * kPi;
    while (phi < -kPi) phi += 2.0 * kPi;

    OrthogonalFit fit;
    fit.angle = phi;
    fit.reflection = best_rf;
    fit.residual = fref / norm_v;
    return fit;
}

std::string to_string(RigidityVerdict v) {
    switch (v) {
        case RigidityVerdict::RigidConsistent: return "RIGID_CONSISTENT";
        case RigidityVerdict::Counterexample: return "COUNTEREXAMPLE";
        default: return "INCONCLUSIVE";
    }
}

RigidityReport check_rigidity(const ScalarField& u, const IntegrandSpec& spec,
                              const RigidityOptions& opt) {
    if (spec.function_class() != IntegrandSpec::FunctionClass::StrictlyConvex)
        throw spec_class_error("check_rigidity: rigidity requires a strictly convex integrand");
    if (!spec.weight_strictly_positive())
        throw spec_class_error("check_rigidity: rigidity requires a strictly positive weight");

    const PolarGrid& g = u.grid();
    ScalarField u0 = extend_by_zero(u);
    DistributionTable table = distribution(u0);
    ScalarField v = rearrange(table, g);

    RigidityReport rep;
    double tol = opt.ps_tol >= 0.0 ? opt.ps_tol
                                   : self_calibrated_tol(u0, spec, Window::full());
    rep.ps = check_ps(u, spec, Window::full(), tol);

    double eps = opt.eps > 0.0 ? opt.eps : g.dtheta();
    DirectionField dir = direction_field(u0, table, opt.nt, eps);
    rep.landscape = classify_landscape(dir.base, eps, opt.kappa, opt.min_area);

    // per-component direction statistics
    bool constant = true;
    for (auto& comp : rep.landscape.components) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t c : comp.cells)
            if (dir.defined[c]) {
                sx += dir.dx[c];
                sy += dir.dy[c];
            }
        double norm = std::hypot(sx, sy);
        if (norm > 1e-12) {
            comp.mean_dir[0] = sx / norm;
            comp.mean_dir[1] = sy / norm;
        }
        double maxdev = 0.0;
        for (std::size_t c : comp.cells)
            if (dir.defined[c]) {
                double dot = std::clamp(
                    dir.dx[c] * comp.mean_dir[0] + dir.dy[c] * comp.mean_dir[1], -1.0, 1.0);
                maxdev = std::max(maxdev, std::acos(dot));
            }
        comp.max_dev = maxdev;
        if (maxdev > opt.dir_dev_cells * g.dtheta()) constant = false;
    }
    rep.direction_constant = constant;

    rep.fit = fit_orthogonal(u0, v);

    std::size_t ncomp = rep.landscape.components.size();
    bool big_residual = rep.fit.residual > opt.residual_threshold;
    if (rep.ps.equality && (ncomp >= 2 || !constant) && big_residual)
        rep.verdict = RigidityVerdict::Counterexample;
    else if (rep.ps.equality && ncomp == 1 && constant && !big_residual)
        rep.verdict = RigidityVerdict::RigidConsistent;
    else
        rep.verdict = RigidityVerdict::Inconclusive;
    return rep;
}

std::string rigidity_report_json(const RigidityReport& rep) {
    nlohmann::json j;
    j["ps"] = {{"lhs", rep.ps.lhs}, {"rhs", rep.ps.rhs}, {"equality", rep.ps.equality}};
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : rep.landscape.components)
        comps.push_back({{"measure", c.measure},
                         {"mean_direction", {c.mean_dir[0], c.mean_dir[1]}},
                         {"max_dev", c.max_dev}});
    nlohmann::json pinches = nlohmann::json::array();
    for (const auto& p : rep.landscape.pinches)
        pinches.push_back({{"r", p.r}, {"y", p.y}, {"t", p.t}, {"faces", p.faces}});
    j["landscape"] = {{"components", comps},
                      {"singular_faces", rep.landscape.singular_faces},
                      {"pinches", pinches},
                      {"inconclusive_measure", rep.landscape.inconclusive_measure}};
    j["fit"] = {{"angle", rep.fit.angle},
                {"reflection", rep.fit.reflection},
                {"residual", rep.fit.residual}};
    j["verdict"] = to_string(rep.verdict);
    return j.dump(2) + "\n";
}

}  // namespace circsym
