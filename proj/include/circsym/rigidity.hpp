#pragma once

#include <string>
#include <vector>

#include "circsym/functional.hpp"
#include "circsym/grid.hpp"
#include "circsym/symmetrize.hpp"

namespace circsym {

/// Unit direction d(r,y,t) at the angular centroid of the slice superlevel
/// set, on the same lattice as an AlphaField; e1 by convention where alpha
/// leaves (eps, pi - eps).
struct DirectionField {
    AlphaField base;  // carries the lattice and alpha values
    double eps = 0.0;
    std::vector<double> dx, dy;
    std::vector<std::uint8_t> defined;

    bool is_defined(int i, int k, int l) const { return defined[base.index(i, k, l)] != 0; }
};

DirectionField direction_field(const ScalarField& u0, const DistributionTable& table,
                               int nt = 0, double eps = -1.0);

struct LandscapeComponent {
    double measure = 0.0;
    std::vector<std::size_t> cells;  // lattice indices
    double mean_dir[2] = {1.0, 0.0};
    double max_dev = 0.0;  // max angle to mean over defined direction samples
};

struct Pinch {
    double r = 0.0, y = 0.0, t = 0.0;
    int faces = 0;
};

/// LOW / MID / HIGH classification of the alpha lattice with the singular
/// faces removed from MID connectivity, narrow necks cut, and small
/// components merged into an inconclusive mass.
struct AlphaLandscape {
    AlphaField alpha;
    double eps = 0.0, kappa = 0.0, min_area = 0.0;
    std::vector<std::uint8_t> cls;  // 0 LOW, 1 MID, 2 HIGH
    std::vector<int> label;         // component id, -1 none, -2 inconclusive
    std::vector<LandscapeComponent> components;
    long long singular_faces = 0;
    std::vector<Pinch> pinches;
    double inconclusive_measure = 0.0;
};

/// kappa <= 0 selects 10x the median inter-cell |dalpha| between MID cells;
/// min_area <= 0 selects 10 lattice cells' measure.
AlphaLandscape classify_landscape(const AlphaField& alpha, double eps, double kappa = -1.0,
                                  double min_area = -1.0);

struct OrthogonalFit {
    double angle = 0.0;  // phi minimizing ||u(r,theta) - v(r, s*theta + phi)||_1
    bool reflection = false;
    double residual = 0.0;
};

class degenerate_norm_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Best L1 fit over O(2): whole-cell rotation scan (exact permutations) x
/// {id, reflection}, then golden-section refinement with linear angular
/// interpolation.
OrthogonalFit fit_orthogonal(const ScalarField& u, const ScalarField& v);

enum class RigidityVerdict { RigidConsistent, Counterexample, Inconclusive };
std::string to_string(RigidityVerdict v);

struct RigidityOptions {
    double ps_tol = -1.0;     // < 0: self-calibrated
    double eps = -1.0;        // < 0: one angular cell
    double kappa = -1.0;      // < 0: auto
    double min_area = -1.0;   // < 0: auto
    double residual_threshold = 0.02;
    double dir_dev_cells = 3.0;  // direction constancy margin in theta cells
    int nt = 0;               // alpha lattice resolution, 0 auto
};

struct RigidityReport {
    PsReport ps;
    AlphaLandscape landscape;
    OrthogonalFit fit;
    bool direction_constant = false;
    RigidityVerdict verdict = RigidityVerdict::Inconclusive;
};

class spec_class_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Full rigidity diagnostic; requires a strictly convex integrand with
/// strictly positive weight (spec_class_error otherwise).
RigidityReport check_rigidity(const ScalarField& u, const IntegrandSpec& spec,
                              const RigidityOptions& opt = {});

/// JSON per the report schema: ps / landscape / fit / verdict.
std::string rigidity_report_json(const RigidityReport& rep);

}  // namespace circsym
