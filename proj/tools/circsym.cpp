// circsym: build example fields, symmetrize, export mu tables, evaluate
// weighted convex functionals, and run the inequality / rigidity checks.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "circsym/corpus.hpp"
#include "circsym/functional.hpp"
#include "circsym/geometry.hpp"
#include "circsym/grid.hpp"
#include "circsym/rigidity.hpp"
#include "circsym/symmetrize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

std::pair<double, double> parse_range(const std::string& s, const char* what) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError(std::string(what) + " expects a,b");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

circsym::Window make_window(const std::string& rwindow, const std::string& twindow,
                            const std::string& ywindow) {
    circsym::Window w = circsym::Window::full();
    if (!rwindow.empty()) {
        auto [a, b] = parse_range(rwindow, "--rwindow");
        w = circsym::Window::radial(a, b);
    }
    if (!ywindow.empty()) {
        auto [a, b] = parse_range(ywindow, "--ywindow");
        w.with_y(a, b);
    }
    if (!twindow.empty()) {
        auto [a, b] = parse_range(twindow, "--twindow");
        w.with_t(a, b);
    }
    return w;
}

circsym::IntegrandSpec make_spec(const std::string& integrand, const std::string& weight) {
    circsym::IntegrandSpec spec = circsym::IntegrandSpec::parse(integrand);
    if (!weight.empty()) spec.with_weight_spec(weight);
    return spec;
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circular symmetrization toolkit"};
    app.require_subcommand(1);

    // example
    auto* cmd_example = app.add_subcommand("example", "build a corpus example field");
    std::string ex_name, ex_out;
    std::vector<std::string> ex_params;
    int ex_nr = 256, ex_ntheta = 1024;
    cmd_example->add_option("--name", ex_name, "example name")->required();
    cmd_example->add_option("--out", ex_out, "output field file")->required();
    cmd_example->add_option("--param", ex_params, "parameter override k=v (a, delta, gamma)");
    cmd_example->add_option("--nr", ex_nr, "radial resolution");
    cmd_example->add_option("--ntheta", ex_ntheta, "angular resolution");

    // symmetrize
    auto* cmd_sym = app.add_subcommand("symmetrize", "circular rearrangement of a field");
    std::string sy_in, sy_out;
    bool sy_restricted = false;
    cmd_sym->add_option("--in", sy_in)->required();
    cmd_sym->add_option("--out", sy_out)->required();
    cmd_sym->add_flag("--restricted", sy_restricted, "use the domain-restricted mu'");

    // mu
    auto* cmd_mu = app.add_subcommand("mu", "export the distribution table as CSV");
    std::string mu_in, mu_out;
    bool mu_restricted = false;
    cmd_mu->add_option("--in", mu_in)->required();
    cmd_mu->add_option("--out", mu_out)->required();
    cmd_mu->add_flag("--restricted", mu_restricted);

    // functional
    auto* cmd_fun = app.add_subcommand("functional", "evaluate the weighted convex functional");
    std::string fu_in, fu_integrand, fu_weight, fu_rw, fu_tw, fu_yw, fu_json;
    cmd_fun->add_option("--in", fu_in)->required();
    cmd_fun->add_option("--integrand", fu_integrand)->required();
    cmd_fun->add_option("--weight", fu_weight);
    cmd_fun->add_option("--rwindow", fu_rw);
    cmd_fun->add_option("--twindow", fu_tw);
    cmd_fun->add_option("--ywindow", fu_yw);
    cmd_fun->add_option("--json", fu_json, "output path (default stdout)");

    // check-ps
    auto* cmd_ps = app.add_subcommand("check-ps", "Polya-Szego inequality check");
    std::string ps_in, ps_integrand, ps_weight, ps_rw, ps_json;
    double ps_tol = -1.0;
    cmd_ps->add_option("--in", ps_in)->required();
    cmd_ps->add_option("--integrand", ps_integrand)->required();
    cmd_ps->add_option("--weight", ps_weight);
    cmd_ps->add_option("--rwindow", ps_rw);
    cmd_ps->add_option("--tol", ps_tol, "tolerance (default: self-calibrated)");
    cmd_ps->add_option("--json", ps_json);

    // perimeter
    auto* cmd_per = app.add_subcommand("perimeter", "windowed set-perimeter inequality");
    std::string pe_set, pe_csv;
    std::vector<std::string> pe_rw;
    cmd_per->add_option("--set", pe_set)->required();
    cmd_per->add_option("--rwindow", pe_rw, "radial window a,b (repeatable)");
    cmd_per->add_option("--csv", pe_csv);

    // check-rigidity
    auto* cmd_rig = app.add_subcommand("check-rigidity", "rigidity diagnostics");
    std::string rg_in, rg_integrand, rg_weight, rg_json;
    cmd_rig->add_option("--in", rg_in)->required();
    cmd_rig->add_option("--integrand", rg_integrand)->required();
    cmd_rig->add_option("--weight", rg_weight);
    cmd_rig->add_option("--json", rg_json);

    // verify-densities
    auto* cmd_den = app.add_subcommand("verify-densities", "density identity check");
    std::string de_in, de_json;
    cmd_den->add_option("--in", de_in)->required();
    cmd_den->add_option("--json", de_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*cmd_example) {
            circsym::ExampleSpec spec;
            spec.name = circsym::parse_example_name(ex_name);
            spec.nr = ex_nr;
            spec.ntheta = ex_ntheta;
            for (const std::string& p : ex_params) {
                auto eq = p.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--param expects k=v, got '" + p + "'");
                spec.set_param(p.substr(0, eq), std::stod(p.substr(eq + 1)));
            }
            circsym::BuiltExample ex = circsym::build_example(spec);
            circsym::write_field(ex_out, ex.u);
            return kExitOk;
        }

        if (*cmd_sym) {
            circsym::ScalarField u = circsym::read_field(sy_in);
            circsym::DistributionTable table =
                sy_restricted ? circsym::restricted_distribution(u)
                              : circsym::distribution(circsym::extend_by_zero(u));
            circsym::write_field(sy_out, circsym::rearrange(table, u.grid()));
            return kExitOk;
        }

        if (*cmd_mu) {
            circsym::ScalarField u = circsym::read_field(mu_in);
            circsym::DistributionTable table =
                mu_restricted ? circsym::restricted_distribution(u)
                              : circsym::distribution(circsym::extend_by_zero(u));
            std::ofstream os(mu_out);
            if (!os) throw std::runtime_error("cannot open for writing: " + mu_out);
            circsym::write_mu_csv(os, table);
            return kExitOk;
        }

        if (*cmd_fun) {
            circsym::ScalarField u = circsym::read_field(fu_in);
            circsym::IntegrandSpec spec = make_spec(fu_integrand, fu_weight);
            circsym::Window w = make_window(fu_rw, fu_tw, fu_yw);
            double value = circsym::evaluate(u, spec, w);
            nlohmann::json j;
            j["value"] = value;
            j["integrand"] = fu_integrand;
            j["weight"] = fu_weight.empty() ? "const:1" : fu_weight;
            write_text(fu_json, j.dump(2) + "\n");
            return kExitOk;
        }

        if (*cmd_ps) {
            circsym::ScalarField u = circsym::read_field(ps_in);
            circsym::IntegrandSpec spec = make_spec(ps_integrand, ps_weight);
            circsym::Window w = make_window(ps_rw, "", "");
            circsym::PsReport rep = ps_tol >= 0.0 ? circsym::check_ps(u, spec, w, ps_tol)
                                                  : circsym::check_ps_auto(u, spec, w);
            nlohmann::json j;
            j["lhs"] = rep.lhs;
            j["rhs"] = rep.rhs;
            j["tol"] = rep.tol;
            j["holds"] = rep.holds;
            j["equality"] = rep.equality;
            write_text(ps_json, j.dump(2) + "\n");
            return rep.holds ? kExitOk : kExitCheckFailed;
        }

        if (*cmd_per) {
            circsym::ScalarField E = circsym::read_field(pe_set);
            std::vector<circsym::Window> windows;
            for (const std::string& s : pe_rw) {
                auto [a, b] = parse_range(s, "--rwindow");
                windows.push_back(circsym::Window::radial(a, b));
            }
            if (windows.empty()) windows.push_back(circsym::Window::full());
            circsym::PerimeterCheck check = circsym::check_perimeter_inequality(E, windows);
            std::ostringstream os;
            circsym::write_perimeter_csv(os, check);
            write_text(pe_csv, os.str());
            return check.all_hold ? kExitOk : kExitCheckFailed;
        }

        if (*cmd_rig) {
            circsym::ScalarField u = circsym::read_field(rg_in);
            circsym::IntegrandSpec spec = make_spec(rg_integrand, rg_weight);
            circsym::RigidityReport rep = circsym::check_rigidity(u, spec);
            write_text(rg_json, circsym::rigidity_report_json(rep));
            return kExitOk;
        }

        if (*cmd_den) {
            circsym::ScalarField u = circsym::read_field(de_in);
            circsym::DensityReport rep = circsym::verify_density_identities(u);
            nlohmann::json j;
            j["dt_mu_mismatch"] = rep.dt_mu_mismatch;
            j["r_dr_xi_mismatch"] = rep.r_dr_xi_mismatch;
            j["dy_mu_mismatch"] = rep.dy_mu_mismatch;
            j["points"] = rep.points;
            j["degenerate_excluded"] = rep.degenerate_excluded;
            write_text(de_json, j.dump(2) + "\n");
            return kExitOk;
        }
    } catch (const circsym::field_parse_error& e) {
        std::cerr << "field parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
