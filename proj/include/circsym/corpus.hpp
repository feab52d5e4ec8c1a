#pragma once

#include <functional>
#include <map>
#include <string>

#include "circsym/grid.hpp"

namespace circsym {

enum class ExampleName {
    QuarterLinear,
    AnnulusWedge,
    PolygonalAnnulus,
    TripleCone,
    DoubleCone,
    ConeCollar,
    QuadrantIndicator,
};

ExampleName parse_example_name(const std::string& s);
std::string to_string(ExampleName n);

struct ExampleSpec {
    ExampleName name = ExampleName::QuarterLinear;
    int nr = 256;
    int ntheta = 1024;
    double wedge_a = 0.5;         // in (0, pi/4)
    double collar_delta = 0.05;   // 0 < delta << 1
    double collar_gamma = kPi / 8.0;  // in (0, pi/4)

    void set_param(const std::string& key, double value);
};

struct ExampleMetadata {
    /// Named closed-form values (dirichlet2_u, dirichlet2_v, ...).
    std::map<std::string, double> values;
    std::string expected_verdict;  // empty when rigidity is not the point
    bool expects_condition_b_violation = false;
    bool expects_trace_violation = false;
    bool has_closed_form_v = false;
    std::function<double(double r, double theta)> closed_form_v;
};

struct BuiltExample {
    ScalarField u;
    ExampleMetadata meta;
};

/// Deterministic constructor for the worked examples, parameterized as in the
/// source text. Out-of-range parameters (resolution < 64, wedge slope outside
/// (0, pi/4), ...) throw std::invalid_argument.
BuiltExample build_example(const ExampleSpec& spec);

}  // namespace circsym
