#pragma once

#include <iosfwd>
#include <vector>

#include "circsym/functional.hpp"
#include "circsym/grid.hpp"

namespace circsym {

struct PerimeterEstimate {
    double total = 0.0;
    /// Length of each connected contour piece inside the window (the
    /// unsigned per-arc diagnostics of the windowed inequality).
    std::vector<double> component_lengths;
};

/// Contour length of the 0.5-level set of an indicator field, traced in the
/// (r, theta) chart with arc element sqrt(dr^2 + r^2 dtheta^2), restricted to
/// the window's annulus. ny must be 0.
PerimeterEstimate set_perimeter(const ScalarField& E, const Window& w);

/// Max relative contour error on centered discs at this resolution.
double disc_calibration_error(const PolarGrid& g);

struct PerimeterWindowResult {
    Window window;
    double p_set = 0.0;
    double p_sym = 0.0;
    double tol = 0.0;
    bool holds = false;
    std::vector<double> arcs_set, arcs_sym;
};

struct PerimeterCheck {
    std::vector<PerimeterWindowResult> windows;
    bool all_hold = true;
};

/// P(E^s; w) <= P(E; w) + tol per window; tol < 0 selects 3x the disc
/// calibration error times the window perimeter scale.
PerimeterCheck check_perimeter_inequality(const ScalarField& E,
                                          const std::vector<Window>& windows,
                                          double tol = -1.0);

/// Quadrature of sqrt(1 + |grad u|^2) over the window. An OUTSIDE cell in the
/// window is a domain error.
double subgraph_perimeter(const ScalarField& u, const Window& w);

/// Number of 0<->1 transitions around the circle slice (i, k); always even.
int slice_endpoint_count(const ScalarField& E, int i, int k);

void write_perimeter_csv(std::ostream& os, const PerimeterCheck& check);

}  // namespace circsym
