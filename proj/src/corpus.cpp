#include "circsym/corpus.hpp"

#include <cmath>
#include <stdexcept>

namespace circsym {

ExampleName parse_example_name(const std::string& s) {
    if (s == "quarter-linear") return ExampleName::QuarterLinear;
    if (s == "annulus-wedge") return ExampleName::AnnulusWedge;
    if (s == "polygonal-annulus") return ExampleName::PolygonalAnnulus;
    if (s == "triple-cone") return ExampleName::TripleCone;
    if (s == "double-cone") return ExampleName::DoubleCone;
    if (s == "cone-collar") return ExampleName::ConeCollar;
    if (s == "quadrant-indicator") return ExampleName::QuadrantIndicator;
    throw std::invalid_argument("unknown example name '" + s + "'");
}

std::string to_string(ExampleName n) {
    switch (n) {
        case ExampleName::QuarterLinear: return "quarter-linear";
        case ExampleName::AnnulusWedge: return "annulus-wedge";
        case ExampleName::PolygonalAnnulus: return "polygonal-annulus";
        case ExampleName::TripleCone: return "triple-cone";
        case ExampleName::DoubleCone: return "double-cone";
        case ExampleName::ConeCollar: return "cone-collar";
        default: return "quadrant-indicator";
    }
}

void ExampleSpec::set_param(const std::string& key, double value) {
    if (key == "a")
        wedge_a = value;
    else if (key == "delta")
        collar_delta = value;
    else if (key == "gamma")
        collar_gamma = value;
    else
        throw std::invalid_argument("unknown example parameter '" + key + "'");
}

namespace {

double cone(double x1, double x2, double c1, double c2) {
    return std::max(0.0, 1.0 - std::hypot(x1 - c1, x2 - c2));
}

// C1 smoothstep: 0 below -1/2, 1 above 0, cubic in between
double collar_phi(double s) {
    if (s <= -0.5) return 0.0;
    if (s >= 0.0) return 1.0;
    double w = 2.0 * s + 1.0;
    return w * w * (3.0 - 2.0 * w);
}

void fill(ScalarField& u, const std::function<bool(double, double)>& inside,
          const std::function<double(double, double)>& value) {
    const PolarGrid& g = u.grid();
    for (int i = 0; i < g.nr; ++i) {
        double r = g.r(i);
        for (int j = 0; j < g.ntheta; ++j) {
            double th = g.theta(j);
            if (inside(r, th)) u.set(i, j, 0, value(r, th));
        }
    }
}

}  // namespace

BuiltExample build_example(const ExampleSpec& spec) {
    if (spec.nr < 64 || spec.ntheta < 64)
        throw std::invalid_argument("example resolution must be >= 64 per dimension");

    ExampleMetadata meta;
    switch (spec.name) {
        case ExampleName::QuarterLinear: {
            PolarGrid g(spec.nr, spec.ntheta, 0, 0.0, 1.0);
            ScalarField u(g);
            fill(u, [](double, double th) { return th > 0.0 && th < kPi / 2.0; },
                 [](double r, double th) { return r * std::cos(th); });
            meta.values["dirichlet2_u"] = kPi / 4.0;
            // oracle: int over {|theta|<pi/4, r<1} of (1 + 3 sin^2 2theta) r dr dtheta
            meta.values["dirichlet2_v"] = kPi / 4.0 + 3.0 * kPi / 8.0;
            meta.expects_trace_violation = true;
            meta.has_closed_form_v = true;
            meta.closed_form_v = [](double r, double th) {
                return std::fabs(th) < kPi / 4.0 ? r * std::cos(2.0 * th) : 0.0;
            };
            return {std::move(u), std::move(meta)};
        }
        case ExampleName::AnnulusWedge: {
            double a = spec.wedge_a;
            if (!(a > 0.0 && a < kPi / 4.0))
                throw std::invalid_argument("annulus-wedge: a must lie in (0, pi/4)");
            PolarGrid g(spec.nr, spec.ntheta, 0, 1.0, 2.0);
            ScalarField u(g);
            fill(u,
                 [a](double r, double th) { return std::fabs(th) < kPi / 4.0 + a * (r - 1.0); },
                 [](double, double th) {
                     double f = std::fabs(th);
                     return f <= kPi / 4.0 ? f - kPi / 4.0 : 0.0;
                 });
            meta.values["dirichlet2_u"] = 0.5 * kPi * std::log(2.0);
            meta.values["dirichlet2_w_restricted"] =
                0.5 * kPi * std::log(2.0) + 0.75 * kPi * a * a;
            meta.expects_condition_b_violation = true;
            meta.has_closed_form_v = true;
            // mu-route rearrangement: a back notch, min(0, 3pi/4 - |theta|)
            meta.closed_form_v = [](double, double th) {
                return std::min(0.0, 0.75 * kPi - std::fabs(th));
            };
            return {std::move(u), std::move(meta)};
        }
        case ExampleName::PolygonalAnnulus: {
            PolarGrid g(spec.nr, spec.ntheta, 0, 1.0, 2.0);
            ScalarField u(g);
            fill(u, [](double, double) { return true; },
                 [](double, double th) {
                     if (th >= -kPi / 4.0 && th <= 0.0) return 2.0 * th + kPi / 2.0;
                     if (th > 0.0 && th <= 0.75 * kPi) return -2.0 / 3.0 * th + kPi / 2.0;
                     return 0.0;
                 });
            meta.values["abs_tangential_u"] = kPi;
            meta.values["abs_tangential_v"] = kPi;
            meta.has_closed_form_v = true;
            meta.closed_form_v = [](double, double th) {
                return std::max(0.0, kPi / 2.0 - std::fabs(th));
            };
            return {std::move(u), std::move(meta)};
        }
        case ExampleName::TripleCone: {
            PolarGrid g(spec.nr, spec.ntheta, 0, 0.0, 5.0);
            ScalarField u(g);
            fill(u, [](double, double) { return true; },
                 [](double r, double th) {
                     double x1 = r * std::cos(th), x2 = r * std::sin(th);
                     return 2.0 * std::max({cone(x1, x2, 0.0, 0.0), cone(x1, x2, 4.0, 0.0),
                                            cone(x1, x2, 0.0, 2.0)});
                 });
            meta.values["dirichlet2_u"] = 12.0 * kPi;
            meta.values["dirichlet2_v"] = 12.0 * kPi;
            meta.values["pinch_r"] = 3.0;
            meta.values["pinch_t"] = 0.0;
            meta.expected_verdict = "COUNTEREXAMPLE";
            meta.has_closed_form_v = true;
            meta.closed_form_v = [](double r, double th) {
                double x1 = r * std::cos(th), x2 = r * std::sin(th);
                return 2.0 * std::max({cone(x1, x2, 0.0, 0.0), cone(x1, x2, 2.0, 0.0),
                                       cone(x1, x2, 4.0, 0.0)});
            };
            return {std::move(u), std::move(meta)};
        }
        case ExampleName::DoubleCone: {
            PolarGrid g(spec.nr, spec.ntheta, 0, 0.0, 5.0);
            ScalarField u(g);
            fill(u, [](double, double) { return true; },
                 [](double r, double th) {
                     double x1 = r * std::cos(th), x2 = r * std::sin(th);
                     return 2.0 * std::max(cone(x1, x2, 0.0, 0.0), cone(x1, x2, 0.0, 2.0));
                 });
            meta.values["dirichlet2_u"] = 8.0 * kPi;
            meta.values["dirichlet2_v"] = 8.0 * kPi;
            meta.values["fit_angle_abs"] = kPi / 2.0;
            meta.expected_verdict = "RIGID_CONSISTENT";
            meta.has_closed_form_v = true;
            meta.closed_form_v = [](double r, double th) {
                double x1 = r * std::cos(th), x2 = r * std::sin(th);
                return 2.0 * std::max(cone(x1, x2, 0.0, 0.0), cone(x1, x2, 2.0, 0.0));
            };
            return {std::move(u), std::move(meta)};
        }
        case ExampleName::ConeCollar: {
            double delta = spec.collar_delta, gamma = spec.collar_gamma;
            if (!(delta > 0.0 && delta <= 0.5))
                throw std::invalid_argument("cone-collar: delta must lie in (0, 1/2]");
            if (!(gamma > 0.0 && gamma < kPi / 4.0))
                throw std::invalid_argument("cone-collar: gamma must lie in (0, pi/4)");
            PolarGrid g(spec.nr, spec.ntheta, 0, 0.0, 5.0);
            double cx = (2.0 + delta) * std::cos(gamma), cy = (2.0 + delta) * std::sin(gamma);
            ScalarField u(g);
            fill(u, [](double, double) { return true; },
                 [=](double r, double th) {
                     double x1 = r * std::cos(th), x2 = r * std::sin(th);
                     double v1 = 2.0 * std::max(0.0, 1.0 - r);
                     double v2 = 0.75 * std::max(0.0, 2.0 - r) * collar_phi(std::cos(th));
                     double v3 = 2.0 * cone(x1, x2, cx, cy);
                     return std::max({v1, v2, v3});
                 });
            meta.expected_verdict = "COUNTEREXAMPLE";
            meta.has_closed_form_v = true;
            meta.closed_form_v = [=](double r, double th) {
                double x1 = r * std::cos(th), x2 = r * std::sin(th);
                double v1 = 2.0 * std::max(0.0, 1.0 - r);
                double v2 = 0.75 * std::max(0.0, 2.0 - r) * collar_phi(std::cos(th));
                double v3 = 2.0 * cone(x1, x2, 2.0 + delta, 0.0);
                return std::max({v1, v2, v3});
            };
            return {std::move(u), std::move(meta)};
        }
        case ExampleName::QuadrantIndicator: {
            PolarGrid g(spec.nr, spec.ntheta, 0, 0.0, 1.0);
            ScalarField u(g);
            fill(u, [](double, double) { return true; },
                 [](double, double th) { return std::cos(th) * std::sin(th) > 0.0 ? 1.0 : 0.0; });
            meta.values["endpoints_per_slice"] = 4.0;
            meta.has_closed_form_v = true;
            meta.closed_form_v = [](double, double th) {
                return std::fabs(th) < kPi / 2.0 ? 1.0 : 0.0;
            };
            return {std::move(u), std::move(meta)};
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace circsym
