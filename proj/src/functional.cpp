#include "circsym/functional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include "circsym/parallel.hpp"

namespace circsym {

GradientField gradient(const ScalarField& u) {
    const PolarGrid& g = u.grid();
    if (g.nr < 2 || g.ntheta < 2)
        throw resolution_error("gradient: need at least 2 cells per direction");
    if (g.ny == 1)
        throw resolution_error("gradient: ny == 1 cannot carry an axial derivative");

    GradientField out;
    out.grid = g;
    std::size_t n = g.cell_count();
    out.eta.assign(n, 0.0);
    out.tau.assign(n, 0.0);
    if (g.ny > 0) out.zeta.assign(n, 0.0);
    out.defined.assign(n, 0);
    out.one_sided.assign(n, 0);

    const double dr = g.dr(), dth = g.dtheta(), dy = g.dy();

    // one-dimensional stencil: central when both neighbours are usable,
    // one-sided otherwise; flags when not central
    auto diff = [](double um, bool okm, double uc, double up, bool okp, double h,
                   bool& flagged) -> double {
        if (okm && okp) return (up - um) / (2.0 * h);
        flagged = true;
        if (okp) return (up - uc) / h;
        if (okm) return (uc - um) / h;
        return 0.0;
    };

    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            double r = g.r(i);
            for (int j = 0; j < g.ntheta; ++j) {
                if (!u.inside(i, j, k)) continue;
                std::size_t c = g.index(i, j, k);
                out.defined[c] = 1;
                bool flagged = false;
                double uc = u(i, j, k);

                bool okm = i > 0 && u.inside(i - 1, j, k);
                bool okp = i < g.nr - 1 && u.inside(i + 1, j, k);
                out.eta[c] = diff(okm ? u(i - 1, j, k) : 0.0, okm, uc,
                                  okp ? u(i + 1, j, k) : 0.0, okp, dr, flagged);

                int jm = (j + g.ntheta - 1) % g.ntheta;
                int jp = (j + 1) % g.ntheta;
                okm = u.inside(i, jm, k);
                okp = u.inside(i, jp, k);
                out.tau[c] = diff(okm ? u(i, jm, k) : 0.0, okm, uc,
                                  okp ? u(i, jp, k) : 0.0, okp, dth, flagged) / r;

                if (g.ny > 0) {
                    okm = k > 0 && u.inside(i, j, k - 1);
                    okp = k < g.ny - 1 && u.inside(i, j, k + 1);
                    out.zeta[c] = diff(okm ? u(i, j, k - 1) : 0.0, okm, uc,
                                       okp ? u(i, j, k + 1) : 0.0, okp, dy, flagged);
                }
                out.one_sided[c] = flagged;
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// IntegrandSpec

IntegrandSpec IntegrandSpec::dirichlet(double p) {
    if (p < 1.0) throw std::invalid_argument("dirichlet: p must be >= 1");
    IntegrandSpec s;
    s.f_ = [p](double e, double t, double z) {
        return std::pow(e * e + t * t + z * z, 0.5 * p);
    };
    s.class_ = p > 1.0 ? FunctionClass::StrictlyConvex : FunctionClass::Convex;
    s.desc_ = "dirichlet:p=" + std::to_string(p);
    return s;
}

IntegrandSpec IntegrandSpec::aniso(double w1, double w2, double w3, double p) {
    if (p < 1.0 || w1 < 0.0 || w2 < 0.0 || w3 < 0.0)
        throw std::invalid_argument("aniso: need p >= 1 and nonnegative weights");
    IntegrandSpec s;
    s.f_ = [w1, w2, w3, p](double e, double t, double z) {
        return std::pow(w1 * e * e + w2 * t * t + w3 * z * z, 0.5 * p);
    };
    s.class_ = (p > 1.0 && w1 > 0.0 && w2 > 0.0 && w3 > 0.0)
                   ? FunctionClass::StrictlyConvex
                   : FunctionClass::Convex;
    s.desc_ = "aniso";
    return s;
}

IntegrandSpec IntegrandSpec::abs_tangential() {
    IntegrandSpec s;
    s.f_ = [](double, double t, double) { return std::fabs(t); };
    s.class_ = FunctionClass::Convex;
    s.desc_ = "abs-tangential";
    return s;
}

IntegrandSpec IntegrandSpec::custom(Integrand f, FunctionClass claimed) {
    IntegrandSpec s;
    s.f_ = std::move(f);
    s.class_ = claimed;
    s.custom_ = true;
    s.desc_ = "custom";
    s.probe_validate(1.0);
    return s;
}

namespace {

double parse_named(const std::string& part, const std::string& key) {
    if (part.compare(0, key.size(), key) != 0 || part.size() <= key.size() ||
        part[key.size()] != '=')
        throw std::invalid_argument("expected " + key + "=<float> in integrand spec, got '" +
                                    part + "'");
    return std::stod(part.substr(key.size() + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace

IntegrandSpec IntegrandSpec::parse(const std::string& s) {
    if (s == "abs-tangential") return abs_tangential();
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    if (head == "dirichlet") {
        if (colon == std::string::npos)
            throw std::invalid_argument("dirichlet spec needs :p=<float>");
        return dirichlet(parse_named(s.substr(colon + 1), "p"));
    }
    if (head == "aniso") {
        if (colon == std::string::npos)
            throw std::invalid_argument("aniso spec needs :w1=,w2=,w3=,p=");
        auto parts = split(s.substr(colon + 1), ',');
        if (parts.size() != 4) throw std::invalid_argument("aniso spec needs w1,w2,w3,p");
        return aniso(parse_named(parts[0], "w1"), parse_named(parts[1], "w2"),
                     parse_named(parts[2], "w3"), parse_named(parts[3], "p"));
    }
    throw std::invalid_argument("unknown integrand spec '" + s + "'");
}

IntegrandSpec& IntegrandSpec::with_weight(Weight a, bool strictly_positive) {
    a_ = std::move(a);
    weight_positive_ = strictly_positive;
    return *this;
}

IntegrandSpec& IntegrandSpec::with_weight_spec(const std::string& s) {
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    if (head == "const") {
        if (colon == std::string::npos) throw std::invalid_argument("const weight needs :<float>");
        double c = std::stod(s.substr(colon + 1));
        if (c < 0.0) throw std::invalid_argument("weight must be nonnegative");
        return with_weight([c](double, double, double) { return c; }, c > 0.0);
    }
    if (head == "radial-power") {
        if (colon == std::string::npos)
            throw std::invalid_argument("radial-power weight needs :q=<float>");
        double q = parse_named(s.substr(colon + 1), "q");
        return with_weight([q](double r, double, double) { return std::pow(r, q); }, true);
    }
    throw std::invalid_argument("unknown weight spec '" + s + "'");
}

void IntegrandSpec::probe_validate(double s, unsigned seed, int probes) const {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-s, s);
    const double tol = 1e-9;
    for (int n = 0; n < probes; ++n) {
        double e1 = U(rng), t1 = U(rng), z1 = U(rng);
        double e2 = U(rng), t2 = U(rng), z2 = U(rng);
        double f1 = f_(e1, t1, z1);
        // evenness in tau
        if (std::fabs(f_(e1, -t1, z1) - f1) > tol * (1.0 + std::fabs(f1)))
            throw std::invalid_argument("integrand probe: f is not even in tau");
        // midpoint convexity
        double f2 = f_(e2, t2, z2);
        double fm = f_(0.5 * (e1 + e2), 0.5 * (t1 + t2), 0.5 * (z1 + z2));
        double avg = 0.5 * (f1 + f2);
        if (fm > avg + tol * (1.0 + std::fabs(avg)))
            throw std::invalid_argument("integrand probe: f is not midpoint convex");
        // a strictly convex f must show a gap at well-separated probe pairs
        if (class_ == FunctionClass::StrictlyConvex) {
            double d2 = (e1 - e2) * (e1 - e2) + (t1 - t2) * (t1 - t2) + (z1 - z2) * (z1 - z2);
            if (d2 > 0.09 * s * s && avg - fm <= tol * (1.0 + std::fabs(avg)))
                throw std::invalid_argument(
                    "integrand probe: strict convexity violated on a probe pair");
        }
    }
}

// ---------------------------------------------------------------------------
// Window

Window Window::radial(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("Window: need a < b");
    Window w;
    w.r0 = a;
    w.r1 = b;
    return w;
}

Window& Window::with_y(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("Window: need y0 < y1");
    has_y = true;
    y0 = a;
    y1 = b;
    return *this;
}

Window& Window::with_t(double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("Window: need t0 <= t1");
    has_t = true;
    t0 = a;
    t1 = b;
    return *this;
}

// ---------------------------------------------------------------------------
// evaluate

namespace {

// Quantizes atoms to a power-of-two derived from the global max so that int64
// accumulation is exact and window splits are bit-identical.
struct Quantizer {
    double q = 0.0;
    explicit Quantizer(double max_abs, std::size_t count) {
        if (max_abs <= 0.0) return;
        int nb = 1;
        while ((1ull << nb) < count) ++nb;
        int bits = 52 - nb;  // per-atom significant bits
        int e;
        std::frexp(max_abs, &e);
        q = std::ldexp(1.0, e - bits);
    }
    std::int64_t units(double atom) const { return std::llround(atom / q); }
};

}  // namespace

double evaluate(const ScalarField& u, const IntegrandSpec& spec, const Window& w) {
    const PolarGrid& g = u.grid();
    GradientField grad = gradient(u);

    // geometric window check (t-window may legitimately select nothing)
    bool any_slice = false;
    for (int k = 0; k < g.ny_eff() && !any_slice; ++k)
        for (int i = 0; i < g.nr && !any_slice; ++i)
            if (w.contains_slice(g, i, k)) any_slice = true;
    if (!any_slice) throw empty_window_error("evaluate: window disjoint from the grid");

    if (spec.is_custom()) {
        double s = 1e-12;
        for (std::size_t n = 0; n < grad.defined.size(); ++n)
            if (grad.defined[n]) {
                s = std::max(s, std::fabs(grad.eta[n]));
                s = std::max(s, std::fabs(grad.tau[n]));
                if (!grad.zeta.empty()) s = std::max(s, std::fabs(grad.zeta[n]));
            }
        spec.probe_validate(s);
    }

    // atoms over the whole grid: the quantum must not depend on the window
    std::vector<double> atoms(g.cell_count(), 0.0);
    const long long rows = static_cast<long long>(g.ny_eff()) * g.nr;
    std::vector<double> chunk_max(static_cast<std::size_t>(worker_count()), 0.0);
    chunked_for(rows, [&](int chunk, long long b, long long e) {
        double mx = 0.0;
        for (long long row = b; row < e; ++row) {
            int k = static_cast<int>(row / g.nr);
            int i = static_cast<int>(row % g.nr);
            double r = g.r(i), y = g.y(k), cm = g.cell_measure(i);
            for (int j = 0; j < g.ntheta; ++j) {
                std::size_t n = g.index(i, j, k);
                if (!grad.defined[n]) continue;
                double z = grad.zeta.empty() ? 0.0 : grad.zeta[n];
                double atom = spec.weight(r, y, u(i, j, k)) *
                              spec.f(grad.eta[n], grad.tau[n], z) * cm;
                atoms[n] = atom;
                mx = std::max(mx, std::fabs(atom));
            }
        }
        chunk_max[chunk] = std::max(chunk_max[chunk], mx);
    });
    double max_atom = 0.0;
    for (double m : chunk_max) max_atom = std::max(max_atom, m);
    if (max_atom == 0.0) return 0.0;

    Quantizer quant(max_atom, g.cell_count());
    std::vector<std::int64_t> chunk_sum(static_cast<std::size_t>(worker_count()), 0);
    chunked_for(rows, [&](int chunk, long long b, long long e) {
        std::int64_t acc = 0;
        for (long long row = b; row < e; ++row) {
            int k = static_cast<int>(row / g.nr);
            int i = static_cast<int>(row % g.nr);
            if (!w.contains_slice(g, i, k)) continue;
            for (int j = 0; j < g.ntheta; ++j) {
                std::size_t n = g.index(i, j, k);
                if (!grad.defined[n]) continue;
                if (!w.contains_value(u(i, j, k))) continue;
                acc += quant.units(atoms[n]);
            }
        }
        chunk_sum[chunk] += acc;
    });
    std::int64_t total = 0;
    for (std::int64_t s : chunk_sum) total += s;
    return static_cast<double>(total) * quant.q;
}

namespace {

ScalarField coarsen(const ScalarField& u) {
    const PolarGrid& g = u.grid();
    if (g.nr % 2 || g.ntheta % 2 || (g.ny > 0 && g.ny % 2))
        throw resolution_error("coarsen: grid dimensions must be even");
    PolarGrid cg(g.nr / 2, g.ntheta / 2, g.ny > 0 ? g.ny / 2 : 0, g.rmin, g.rmax, g.ymin,
                 g.ymax);
    ScalarField out(cg);
    int kfac = g.ny > 0 ? 2 : 1;
    for (int k = 0; k < cg.ny_eff(); ++k)
        for (int i = 0; i < cg.nr; ++i)
            for (int j = 0; j < cg.ntheta; ++j) {
                double s = 0.0;
                int cnt = 0;
                for (int dk = 0; dk < kfac; ++dk)
                    for (int di = 0; di < 2; ++di)
                        for (int dj = 0; dj < 2; ++dj) {
                            int ii = 2 * i + di, jj = 2 * j + dj, kk = kfac * k + dk;
                            if (u.inside(ii, jj, kk)) {
                                s += u(ii, jj, kk);
                                ++cnt;
                            }
                        }
                if (cnt > 0) out.set(i, j, k, s / cnt);
            }
    return out;
}

}  // namespace

double self_calibrated_tol(const ScalarField& u, const IntegrandSpec& spec, const Window& w) {
    double fine = evaluate(u, spec, w);
    double coarse = evaluate(coarsen(u), spec, w);
    return 5.0 * std::fabs(fine - coarse) + 1e-9 * (1.0 + std::fabs(fine));
}

PsReport check_ps(const ScalarField& u, const IntegrandSpec& spec, const Window& w, double tol) {
    ScalarField u0 = extend_by_zero(u);
    ScalarField v = rearrange(distribution(u0), u0.grid());
    PsReport rep;
    rep.tol = tol;
    rep.lhs = evaluate(v, spec, w);
    rep.rhs = evaluate(u0, spec, w);
    rep.holds = rep.lhs <= rep.rhs + tol;
    rep.equality = std::fabs(rep.lhs - rep.rhs) <= tol;
    return rep;
}

PsReport check_ps_auto(const ScalarField& u, const IntegrandSpec& spec, const Window& w) {
    ScalarField u0 = extend_by_zero(u);
    return check_ps(u, spec, w, self_calibrated_tol(u0, spec, w));
}

// ---------------------------------------------------------------------------
// density identities

DensityReport verify_density_identities(const ScalarField& u, double eps, int nt_eval) {
    ScalarField u0 = extend_by_zero(u);
    const PolarGrid& g = u0.grid();
    DistributionTable table = distribution(u0);
    GradientField grad = gradient(u0);
    if (eps < 0.0) eps = g.dtheta();

    double tmin = table.min_threshold(), tmax = table.max_threshold();
    if (tmax <= tmin) return DensityReport{};
    double h = (tmax - tmin) / 12.0;

    double tau_scale = 0.0;
    for (std::size_t n = 0; n < grad.defined.size(); ++n)
        if (grad.defined[n]) tau_scale = std::max(tau_scale, std::fabs(grad.tau[n]));
    const double degenerate = 1e-6 * tau_scale;

    DensityReport rep;
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            const SliceDistribution& s = table.slice(i, k);
            if (!s.covered) continue;
            double r = g.r(i);
            for (int lt = 0; lt < nt_eval; ++lt) {
                double t = tmin + h + (tmax - tmin - 2.0 * h) * (lt + 0.5) / nt_eval;
                double alpha = s.mu(t) / (2.0 * r);
                if (alpha <= eps || alpha >= kPi - eps) continue;

                // crossing sums around the circle
                double sum_t = 0.0, sum_r = 0.0, sum_y = 0.0;
                bool bad = false;
                int crossings = 0;
                for (int j = 0; j < g.ntheta; ++j) {
                    int jp = (j + 1) % g.ntheta;
                    double a = u0(i, j, k) - t, b = u0(i, jp, k) - t;
                    if ((a > 0.0) == (b > 0.0)) continue;
                    ++crossings;
                    double frac = std::fabs(a) / std::fabs(a - b);
                    std::size_t nj = g.index(i, j, k), njp = g.index(i, jp, k);
                    // a jump (piecewise-constant) crossing shows flat one-sided
                    // slopes on both flanks; the identities need a graded one
                    int jm = (j + g.ntheta - 1) % g.ntheta;
                    int jp2 = (jp + 1) % g.ntheta;
                    double rdth = g.r(i) * g.dtheta();
                    double slope_l = (u0(i, j, k) - u0(i, jm, k)) / rdth;
                    double slope_r = (u0(i, jp2, k) - u0(i, jp, k)) / rdth;
                    if (std::max(std::fabs(slope_l), std::fabs(slope_r)) <= degenerate) {
                        bad = true;
                        break;
                    }
                    double tau = (1.0 - frac) * grad.tau[nj] + frac * grad.tau[njp];
                    if (std::fabs(tau) <= degenerate) {
                        bad = true;
                        break;
                    }
                    double etac = (1.0 - frac) * grad.eta[nj] + frac * grad.eta[njp];
                    sum_t -= 1.0 / std::fabs(tau);
                    sum_r += etac / std::fabs(tau);
                    if (!grad.zeta.empty()) {
                        double zc = (1.0 - frac) * grad.zeta[nj] + frac * grad.zeta[njp];
                        sum_y += zc / std::fabs(tau);
                    }
                }
                if (bad || crossings == 0) {
                    ++rep.degenerate_excluded;
                    continue;
                }

                double fd_t = (s.mu(t + h) - s.mu(t - h)) / (2.0 * h);
                rep.l1_dt_fd += std::fabs(fd_t);
                rep.l1_dt_cross += std::fabs(sum_t);
                rep.dt_mu_mismatch += std::fabs(fd_t - sum_t);

                if (i > 0 && i < g.nr - 1 && table.slice(i - 1, k).covered &&
                    table.slice(i + 1, k).covered) {
                    double xim = table.mu(i - 1, k, t) / g.r(i - 1);
                    double xip = table.mu(i + 1, k, t) / g.r(i + 1);
                    double fd_r = r * (xip - xim) / (2.0 * g.dr());
                    rep.l1_dr_fd += std::fabs(fd_r);
                    rep.l1_dr_cross += std::fabs(sum_r);
                    rep.r_dr_xi_mismatch += std::fabs(fd_r - sum_r);
                }

                if (g.ny > 0 && k > 0 && k < g.ny - 1 && table.slice(i, k - 1).covered &&
                    table.slice(i, k + 1).covered) {
                    double fd_y = (table.mu(i, k + 1, t) - table.mu(i, k - 1, t)) / (2.0 * g.dy());
                    rep.l1_dy_fd += std::fabs(fd_y);
                    rep.l1_dy_cross += std::fabs(sum_y);
                    rep.dy_mu_mismatch += std::fabs(fd_y - sum_y);
                }
                ++rep.points;
            }
        }

    // identities whose both routes vanish against the dt scale are a match,
    // not a 0/0 blow-up (the wedge has r dr xi identically zero)
    double scale = 1e-9 * std::max(1.0, std::max(rep.l1_dt_cross, rep.l1_dt_fd));
    auto rel = [scale](double diff, double ref_a, double ref_b) {
        double ref = std::max(ref_a, ref_b);
        if (ref <= scale) return 0.0;
        return diff / ref;
    };
    rep.dt_mu_mismatch = rel(rep.dt_mu_mismatch, rep.l1_dt_cross, rep.l1_dt_fd);
    rep.r_dr_xi_mismatch = rel(rep.r_dr_xi_mismatch, rep.l1_dr_cross, rep.l1_dr_fd);
    rep.dy_mu_mismatch = rel(rep.dy_mu_mismatch, rep.l1_dy_cross, rep.l1_dy_fd);
    return rep;
}

}  // namespace circsym
