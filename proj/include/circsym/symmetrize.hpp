#pragma once

#include <iosfwd>
#include <vector>

#include "circsym/grid.hpp"

namespace circsym {

/// Exact per-slice distribution mu(t) = H^1({> t}) stored as a right-continuous
/// step function: mu(t) = unit * count_above[l] for t in [thresholds[l],
/// thresholds[l+1]), and unit * count_total below the first threshold.
struct SliceDistribution {
    std::vector<double> thresholds;   // ascending, distinct sample values
    std::vector<int> count_above;     // samples strictly above thresholds[l]
    int count_total = 0;              // samples contributing to the slice
    double unit = 0.0;                // arc measure per sample cell, r * dtheta
    bool covered = false;

    int count_gt(double t) const;
    double mu(double t) const { return unit * count_gt(t); }
};

struct DistributionTable {
    PolarGrid grid;
    std::vector<SliceDistribution> slices;  // k*nr + i

    const SliceDistribution& slice(int i, int k) const {
        return slices[grid.slice_index(i, k)];
    }
    double mu(int i, int k, double t) const { return slice(i, k).mu(t); }
    double alpha(int i, int k, double t) const { return mu(i, k, t) / (2.0 * grid.r(i)); }

    /// Breakpoint range over covered slices; throws empty_domain_error if none.
    double min_threshold() const;
    double max_threshold() const;
};

/// H^1 measure of {u > t} on the circle slice (i,k), with piecewise-linear
/// crossing interpolation between cell centers. Falls back to cell counting
/// when the slice carries OUTSIDE cells. EMPTY slice -> std::domain_error.
double slice_arc_measure(const ScalarField& u, int i, int k, double t);

/// mu from a zero-extension output (slices all-numeric or all-OUTSIDE).
DistributionTable distribution(const ScalarField& u0);

/// mu' measured over the domain cells only (no zero-extension).
DistributionTable restricted_distribution(const ScalarField& u);

/// Cells of a slice ordered by (|theta| ascending, positive theta first);
/// rank k is where the k-th largest sample lands under rearrangement.
std::vector<int> rank_order(const PolarGrid& g);

/// Circular rearrangement v(r,theta,y) = inf{ t : mu(r,y,t) <= 2 r |theta| },
/// realized as the exact rank assignment of the slice samples. Cells whose
/// rank exceeds the slice sample count are OUTSIDE (this is Omega^s for
/// restricted tables); EMPTY slices are OUTSIDE.
ScalarField rearrange(const DistributionTable& table, const PolarGrid& target);

/// Circular symmetrization of an indicator set: per slice a centered arc of
/// the same cell count, remainder cell on theta > 0.
ScalarField symmetrize_set(const ScalarField& indicator);

/// L1 distance sum_slices int |mu1 - mu2| dt * dr * dy; +inf when the t -> -inf
/// tails differ (the integral then diverges).
double distribution_l1_distance(const DistributionTable& a, const DistributionTable& b);
bool distributions_match(const DistributionTable& a, const DistributionTable& b, double tol);

/// alpha = mu/(2r) sampled on a regular (r, y, t) lattice; companion xi = 2 alpha.
struct AlphaField {
    PolarGrid grid;  // source (r, y) geometry
    int nt = 0;
    double tmin = 0.0, tmax = 0.0;

    std::vector<double> alpha;  // ((k*nr + i)*nt + l)

    double dt() const { return (tmax - tmin) / nt; }
    double t(int l) const { return tmin + (l + 0.5) * dt(); }
    std::size_t index(int i, int k, int l) const {
        return (static_cast<std::size_t>(k) * grid.nr + i) * nt + l;
    }
    double at(int i, int k, int l) const { return alpha[index(i, k, l)]; }
    /// (r, y, t)-lattice cell measure dr * dt * (dy).
    double cell_measure() const {
        double m = grid.dr() * dt();
        return grid.ny > 0 ? m * grid.dy() : m;
    }
};

/// nt <= 0 picks nt ~ (threshold range)/dr, clamped to [32, 512].
AlphaField make_alpha_field(const DistributionTable& table, int nt = 0);

/// CSV with columns r,y,t,mu,alpha; one row per breakpoint per covered slice.
void write_mu_csv(std::ostream& os, const DistributionTable& table);

}  // namespace circsym
