#include "circsym/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace circsym {

PolarGrid::PolarGrid(int nr_, int ntheta_, int ny_, double rmin_, double rmax_,
                     double ymin_, double ymax_)
    : nr(nr_), ntheta(ntheta_), ny(ny_), rmin(rmin_), rmax(rmax_), ymin(ymin_), ymax(ymax_) {
    if (nr <= 0 || ntheta <= 0 || ny < 0)
        throw std::invalid_argument("PolarGrid: nr, ntheta must be positive and ny >= 0");
    if (!(rmin >= 0.0) || !(rmin < rmax))
        throw std::invalid_argument("PolarGrid: need 0 <= rmin < rmax");
    if (ny > 0 && !(ymin < ymax))
        throw std::invalid_argument("PolarGrid: need ymin < ymax when ny > 0");
    if (ny == 0) {
        ymin = 0.0;
        ymax = 0.0;
    }
}

bool PolarGrid::same_lattice(const PolarGrid& o) const {
    return ntheta == o.ntheta && same_slice_lattice(o);
}

bool PolarGrid::same_slice_lattice(const PolarGrid& o) const {
    return nr == o.nr && ny == o.ny && rmin == o.rmin && rmax == o.rmax &&
           ymin == o.ymin && ymax == o.ymax;
}

int ProjectionMask::count(SliceCover c) const {
    int n = 0;
    for (SliceCover v : cover)
        if (v == c) ++n;
    return n;
}

ScalarField ScalarField::constant(const PolarGrid& g, double v) {
    ScalarField f(g);
    std::fill(f.values_.begin(), f.values_.end(), v);
    std::fill(f.inside_.begin(), f.inside_.end(), std::uint8_t{1});
    return f;
}

std::size_t ScalarField::inside_count() const {
    std::size_t n = 0;
    for (std::uint8_t b : inside_) n += b;
    return n;
}

bool ScalarField::is_indicator() const {
    for (std::size_t n = 0; n < values_.size(); ++n)
        if (inside_[n] && values_[n] != 0.0 && values_[n] != 1.0) return false;
    return true;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (std::size_t n = 0; n < values_.size(); ++n)
        if (inside_[n]) m = std::max(m, std::fabs(values_[n]));
    return m;
}

double ScalarField::integral() const {
    double s = 0.0;
    for (int k = 0; k < grid_.ny_eff(); ++k)
        for (int i = 0; i < grid_.nr; ++i) {
            double cm = grid_.cell_measure(i);
            for (int j = 0; j < grid_.ntheta; ++j) {
                std::size_t n = grid_.index(i, j, k);
                if (inside_[n]) s += values_[n] * cm;
            }
        }
    return s;
}

double ScalarField::lp_norm(double p) const {
    double s = 0.0;
    for (int k = 0; k < grid_.ny_eff(); ++k)
        for (int i = 0; i < grid_.nr; ++i) {
            double cm = grid_.cell_measure(i);
            for (int j = 0; j < grid_.ntheta; ++j) {
                std::size_t n = grid_.index(i, j, k);
                if (inside_[n]) s += std::pow(std::fabs(values_[n]), p) * cm;
            }
        }
    return std::pow(s, 1.0 / p);
}

ProjectionMask circular_projection(const ScalarField& u) {
    const PolarGrid& g = u.grid();
    ProjectionMask m;
    m.nr = g.nr;
    m.ny_eff = g.ny_eff();
    m.cover.resize(static_cast<std::size_t>(g.nr) * g.ny_eff());
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            int cnt = 0;
            for (int j = 0; j < g.ntheta; ++j)
                if (u.inside(i, j, k)) ++cnt;
            SliceCover c = cnt == 0 ? SliceCover::Empty
                         : cnt == g.ntheta ? SliceCover::Full
                                           : SliceCover::Partial;
            m.cover[g.slice_index(i, k)] = c;
        }
    return m;
}

ScalarField extend_by_zero(const ScalarField& u) {
    const PolarGrid& g = u.grid();
    ProjectionMask m = circular_projection(u);
    if (m.count(SliceCover::Empty) == static_cast<int>(m.cover.size()))
        throw empty_domain_error("extend_by_zero: field has no inside cell");
    ScalarField u0(g);
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            if (m.at(i, k) == SliceCover::Empty) continue;  // stays OUTSIDE
            for (int j = 0; j < g.ntheta; ++j)
                u0.set(i, j, k, u.inside(i, j, k) ? u(i, j, k) : 0.0);
        }
    return u0;
}

std::vector<AdmissibilityIssue> validate_admissible(const ScalarField& u, double trace_tol) {
    const PolarGrid& g = u.grid();
    ProjectionMask m = circular_projection(u);
    if (trace_tol < 0.0) {
        double h = std::max(g.dr(), g.rmax * g.dtheta());
        if (g.ny > 0) h = std::max(h, g.dy());
        trace_tol = 10.0 * h * u.max_abs();
    }
    std::vector<AdmissibilityIssue> issues;
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i) {
            SliceCover cov = m.at(i, k);
            if (cov == SliceCover::Empty) continue;
            for (int j = 0; j < g.ntheta; ++j) {
                if (!u.inside(i, j, k)) continue;
                double v = u(i, j, k);
                if (cov == SliceCover::Partial && v < 0.0)
                    issues.push_back({AdmissibilityIssue::Kind::NegativeOnPartialSlice, i, j, k, v});
                if (std::fabs(v) <= trace_tol) continue;
                // lateral boundary: an OUTSIDE neighbour whose slice is still
                // inside the projection cylinder
                bool lateral = false;
                int jm = (j + g.ntheta - 1) % g.ntheta;
                int jp = (j + 1) % g.ntheta;
                if (!u.inside(i, jm, k) || !u.inside(i, jp, k)) lateral = true;
                if (!lateral && i > 0 && m.at(i - 1, k) != SliceCover::Empty && !u.inside(i - 1, j, k))
                    lateral = true;
                if (!lateral && i < g.nr - 1 && m.at(i + 1, k) != SliceCover::Empty && !u.inside(i + 1, j, k))
                    lateral = true;
                if (!lateral && g.ny > 0) {
                    if (k > 0 && m.at(i, k - 1) != SliceCover::Empty && !u.inside(i, j, k - 1))
                        lateral = true;
                    if (k < g.ny - 1 && m.at(i, k + 1) != SliceCover::Empty && !u.inside(i, j, k + 1))
                        lateral = true;
                }
                if (lateral)
                    issues.push_back({AdmissibilityIssue::Kind::LateralTrace, i, j, k, v});
            }
        }
    return issues;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_field(std::ostream& os, const ScalarField& u) {
    const PolarGrid& g = u.grid();
    os << "circsym-field v1\n";
    os << "nr=" << g.nr << " ntheta=" << g.ntheta << " ny=" << g.ny << "\n";
    os << "rmin=" << fmt17(g.rmin) << " rmax=" << fmt17(g.rmax) << "\n";
    if (g.ny > 0) os << "ymin=" << fmt17(g.ymin) << " ymax=" << fmt17(g.ymax) << "\n";
    os << "data\n";
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                if (u.inside(i, j, k))
                    os << fmt17(u(i, j, k)) << "\n";
                else
                    os << "NA\n";
            }
}

void write_field(const std::string& path, const ScalarField& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_field(os, u);
}

namespace {

// parses "key=<value>" or throws at the given source line
double parse_kv(const std::string& tok, const std::string& key, int line) {
    if (tok.size() <= key.size() + 1 || tok.compare(0, key.size(), key) != 0 || tok[key.size()] != '=')
        throw field_parse_error(line, "expected " + key + "=<value>, got '" + tok + "'");
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok.substr(key.size() + 1), &pos);
    } catch (const std::exception&) {
        throw field_parse_error(line, "bad numeric value in '" + tok + "'");
    }
    if (key.size() + 1 + pos != tok.size())
        throw field_parse_error(line, "trailing characters in '" + tok + "'");
    return v;
}

}  // namespace

ScalarField read_field(std::istream& is) {
    std::string line;
    int ln = 0;
    auto next_line = [&]() {
        if (!std::getline(is, line)) throw field_parse_error(ln + 1, "unexpected end of file");
        ++ln;
    };

    next_line();
    if (line != "circsym-field v1")
        throw field_parse_error(ln, "bad magic, expected 'circsym-field v1'");

    next_line();
    std::istringstream hdr(line);
    std::string t1, t2, t3;
    if (!(hdr >> t1 >> t2 >> t3)) throw field_parse_error(ln, "expected nr= ntheta= ny=");
    int nr = static_cast<int>(parse_kv(t1, "nr", ln));
    int ntheta = static_cast<int>(parse_kv(t2, "ntheta", ln));
    int ny = static_cast<int>(parse_kv(t3, "ny", ln));

    next_line();
    std::istringstream rl(line);
    if (!(rl >> t1 >> t2)) throw field_parse_error(ln, "expected rmin= rmax=");
    double rmin = parse_kv(t1, "rmin", ln);
    double rmax = parse_kv(t2, "rmax", ln);

    double ymin = 0.0, ymax = 0.0;
    if (ny > 0) {
        next_line();
        std::istringstream yl(line);
        if (!(yl >> t1 >> t2)) throw field_parse_error(ln, "expected ymin= ymax=");
        ymin = parse_kv(t1, "ymin", ln);
        ymax = parse_kv(t2, "ymax", ln);
    }

    next_line();
    if (line != "data") throw field_parse_error(ln, "expected 'data'");

    PolarGrid g;
    try {
        g = PolarGrid(nr, ntheta, ny, rmin, rmax, ymin, ymax);
    } catch (const std::invalid_argument& e) {
        throw field_parse_error(ln, e.what());
    }
    ScalarField u(g);
    for (int k = 0; k < g.ny_eff(); ++k)
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.ntheta; ++j) {
                next_line();
                if (line == "NA") continue;
                std::size_t pos = 0;
                double v;
                try {
                    v = std::stod(line, &pos);
                } catch (const std::exception&) {
                    throw field_parse_error(ln, "bad value '" + line + "'");
                }
                if (pos != line.size())
                    throw field_parse_error(ln, "trailing characters in '" + line + "'");
                if (!std::isfinite(v))
                    throw field_parse_error(ln, "non-finite value");
                u.set(i, j, k, v);
            }
    return u;
}

ScalarField read_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_field(is);
}

}  // namespace circsym
