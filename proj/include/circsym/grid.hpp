#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace circsym {

inline constexpr double kPi = 3.14159265358979323846;

class empty_domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class resolution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class field_parse_error : public std::runtime_error {
public:
    field_parse_error(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Cell-centered grid on (r, theta[, y]). Radial nodes sit at
/// r_i = rmin + (i+1/2) dr, angular nodes at theta_j = -pi + (j+1/2) dtheta,
/// so no node falls on r = 0 or on the seam theta = +/-pi.
struct PolarGrid {
    int nr = 0;
    int ntheta = 0;
    int ny = 0;  // 0 means no axial dimension
    double rmin = 0.0;
    double rmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;

    PolarGrid() = default;
    PolarGrid(int nr_, int ntheta_, int ny_, double rmin_, double rmax_,
              double ymin_ = 0.0, double ymax_ = 0.0);

    double dr() const { return (rmax - rmin) / nr; }
    double dtheta() const { return 2.0 * kPi / ntheta; }
    double dy() const { return ny > 0 ? (ymax - ymin) / ny : 1.0; }

    double r(int i) const { return rmin + (i + 0.5) * dr(); }
    double theta(int j) const { return -kPi + (j + 0.5) * dtheta(); }
    double y(int k) const { return ny > 0 ? ymin + (k + 0.5) * dy() : 0.0; }

    int ny_eff() const { return ny > 0 ? ny : 1; }
    std::size_t cell_count() const {
        return static_cast<std::size_t>(nr) * ntheta * ny_eff();
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * nr + i) * ntheta + j;
    }
    std::size_t slice_index(int i, int k) const {
        return static_cast<std::size_t>(k) * nr + i;
    }

    /// Lebesgue measure of cell (i, *, *): r_i dr dtheta (dy).
    double cell_measure(int i) const {
        double m = r(i) * dr() * dtheta();
        return ny > 0 ? m * dy() : m;
    }

    bool same_lattice(const PolarGrid& o) const;
    /// Same (r, y) lattice, theta resolution free.
    bool same_slice_lattice(const PolarGrid& o) const;
};

enum class SliceCover : std::uint8_t { Empty = 0, Partial = 1, Full = 2 };

/// Per-(r_i, y_k) classification of the circular projection: FULL slices form
/// the discrete annular projection, PARTIAL + FULL the discrete projection.
struct ProjectionMask {
    int nr = 0;
    int ny_eff = 1;
    std::vector<SliceCover> cover;  // k*nr + i

    SliceCover at(int i, int k) const { return cover[static_cast<std::size_t>(k) * nr + i]; }
    int count(SliceCover c) const;
};

/// Function samples on a PolarGrid with an explicit OUTSIDE marker; the
/// numeric payload of an OUTSIDE cell is never read by any operation.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const PolarGrid& g)
        : grid_(g), values_(g.cell_count(), 0.0), inside_(g.cell_count(), 0) {}

    static ScalarField constant(const PolarGrid& g, double v);

    const PolarGrid& grid() const { return grid_; }

    bool inside(int i, int j, int k) const { return inside_[grid_.index(i, j, k)] != 0; }
    double operator()(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }

    void set(int i, int j, int k, double v) {
        std::size_t n = grid_.index(i, j, k);
        values_[n] = v;
        inside_[n] = 1;
    }
    void set_outside(int i, int j, int k) {
        std::size_t n = grid_.index(i, j, k);
        values_[n] = 0.0;
        inside_[n] = 0;
    }

    std::size_t inside_count() const;
    bool is_indicator() const;
    double max_abs() const;
    /// Integral of the samples over inside cells (midpoint rule).
    double integral() const;
    double lp_norm(double p) const;

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::uint8_t>& inside_mask() const { return inside_; }
    std::vector<double>& values() { return values_; }
    std::vector<std::uint8_t>& inside_mask() { return inside_; }

private:
    PolarGrid grid_;
    std::vector<double> values_;
    std::vector<std::uint8_t> inside_;
};

ProjectionMask circular_projection(const ScalarField& u);

/// Zero-extension u0: u on inside cells, 0 on cells whose slice meets the
/// domain, OUTSIDE on slices the domain misses entirely.
ScalarField extend_by_zero(const ScalarField& u);

struct AdmissibilityIssue {
    enum class Kind : std::uint8_t { NegativeOnPartialSlice, LateralTrace };
    Kind kind;
    int i, j, k;
    double value;
};

/// Diagnostics for the admissible class: condition (b) (u >= 0 outside the
/// annular part of the projection) and a lateral-trace surrogate for the
/// Sobolev condition. trace_tol < 0 selects 10 * (max grid spacing) * max|u|.
std::vector<AdmissibilityIssue> validate_admissible(const ScalarField& u,
                                                    double trace_tol = -1.0);

// "circsym-field v1" text format; NA marks OUTSIDE, 17 significant digits.
void write_field(std::ostream& os, const ScalarField& u);
void write_field(const std::string& path, const ScalarField& u);
ScalarField read_field(std::istream& is);
ScalarField read_field(const std::string& path);

}  // namespace circsym
