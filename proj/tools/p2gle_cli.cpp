#include "p2gle/errors.hpp"
#include "p2gle/expansion.hpp"
#include "p2gle/gibbs.hpp"
#include "p2gle/pressure.hpp"
#include "p2gle/spectrum.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

namespace {

using nlohmann::ordered_json;
using namespace p2gle;

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no literals for non-finite values: infinities become the strings
// "inf"/"-inf", NaN (used for limits we do not assert) becomes null.
ordered_json jnum(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0.0 ? ordered_json("inf") : ordered_json("-inf");
}

struct GlobalOpts {
    std::string out;
    std::string format = "json";
    double tol = 1e-12;
    int max_iter = 100;
    std::uint64_t seed = 1;
};

void write_out(const GlobalOpts& g, const std::string& payload) {
    if (g.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + g.out + "'");
    f << payload;
    if (!f) throw std::runtime_error("failed writing output file '" + g.out + "'");
}

const char* method_name(SolveMethod m) {
    return m == SolveMethod::closed_form ? "closed_form" : "newton";
}

ordered_json solution_json(const SpectrumSolution& s) {
    ordered_json j;
    j["xi"] = jnum(s.xi);
    j["t"] = jnum(s.t);
    j["q"] = jnum(s.q);
    j["t_prime"] = jnum(s.t_prime);
    j["residual_P"] = jnum(s.residual_P);
    j["residual_dPdq"] = jnum(s.residual_dPdq);
    j["iterations"] = s.iterations;
    j["method"] = method_name(s.method);
    return j;
}

std::string solution_csv_row(const SpectrumSolution& s) {
    return fmt17(s.xi) + "," + fmt17(s.t) + "," + fmt17(s.q) + "," + fmt17(s.t_prime) + "\n";
}

// Levels may be numeric, the literal "xi0" (the typical log-digit average,
// computed, not hard-coded), or "inf" (exp-digit only).
double parse_level(const std::string& text, PotentialKind kind, bool allow_inf) {
    if (text == "xi0") return logdigit_xi0();
    if (text == "inf") {
        if (!allow_inf || kind != PotentialKind::exp_digit)
            throw std::domain_error("the 'inf' level is only accepted for expdigit solve");
        return std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::domain_error("could not parse level '" + text + "'");
    }
    if (used != text.size()) throw std::domain_error("could not parse level '" + text + "'");
    return v;
}

// Exact boundary levels return pinned constants instead of entering the
// solver: the level sets at the edge are degenerate with dimension 0 (or, for
// the exp-digit level at infinity, full dimension 1).
bool boundary_solution(PotentialKind kind, double xi, SpectrumSolution& s) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    if (std::isinf(xi) && kind == PotentialKind::exp_digit) {
        s = SpectrumSolution{xi, boundary_dimension(kind, BoundarySide::infinity), 0.0, 0.0,
                             0.0, 0.0, 0, SolveMethod::closed_form};
        return true;
    }
    switch (kind) {
        case PotentialKind::khintchine:
            if (xi == 1.0) {
                s = khintchine_spectrum(1.0);
                return true;
            }
            return false;
        case PotentialKind::lyapunov:
            if (xi == std::log(2.0)) {
                s = lyapunov_spectrum(std::log(2.0));
                return true;
            }
            return false;
        case PotentialKind::log_digit:
        case PotentialKind::exp_digit: {
            double edge = (kind == PotentialKind::log_digit) ? 0.0 : 2.0;
            if (xi == edge) {
                // q -> -inf collapses the digit law onto all-ones; the slope
                // at the edge is not asserted.
                s = SpectrumSolution{xi, boundary_dimension(kind), -inf, nan,
                                     0.0, 0.0, 0, SolveMethod::closed_form};
                return true;
            }
            return false;
        }
    }
    return false;
}

int cmd_encode(const GlobalOpts& g, const std::string& x_text, long depth) {
    Rational x = Rational::parse(x_text);
    DigitSequence d = encode(x, static_cast<std::size_t>(depth));
    CylinderInterval c = cylinder(d);
    if (g.format == "json") {
        ordered_json j;
        j["digits"] = d.digits;
        j["left"] = c.left.str();
        j["right"] = c.right.str();
        j["depth"] = c.depth;
        write_out(g, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << format_digits(d) << "\n";
        os << "cylinder (" << c.left.str() << ", " << c.right.str() << "] depth=" << c.depth
           << "\n";
        write_out(g, os.str());
    }
    return 0;
}

int cmd_decode(const GlobalOpts& g, const std::string& digits_text, const std::string& tail) {
    DigitSequence d = parse_digits(digits_text);
    d.tail = (tail == "allones") ? Tail::all_ones : Tail::unspecified;
    auto result = decode(d);
    if (g.format == "json") {
        ordered_json j;
        if (std::holds_alternative<Rational>(result)) {
            j["exact"] = true;
            j["value"] = std::get<Rational>(result).str();
        } else {
            const CylinderInterval& c = std::get<CylinderInterval>(result);
            j["exact"] = false;
            j["left"] = c.left.str();
            j["right"] = c.right.str();
            j["depth"] = c.depth;
        }
        write_out(g, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        if (std::holds_alternative<Rational>(result)) {
            os << std::get<Rational>(result).str() << "\n";
        } else {
            const CylinderInterval& c = std::get<CylinderInterval>(result);
            os << "cylinder (" << c.left.str() << ", " << c.right.str() << "] depth=" << c.depth
               << "\n";
        }
        write_out(g, os.str());
    }
    return 0;
}

int cmd_solve(const GlobalOpts& g, const std::string& potential, const std::string& xi_text) {
    PotentialKind kind = parse_potential(potential);
    double xi = parse_level(xi_text, kind, /*allow_inf=*/true);
    SpectrumSolution s;
    if (!boundary_solution(kind, xi, s)) {
        if (kind == PotentialKind::khintchine) {
            s = khintchine_spectrum(xi);
        } else if (kind == PotentialKind::lyapunov) {
            s = lyapunov_spectrum(xi);
        } else {
            SolverOptions opts{g.tol, g.max_iter};
            s = solve_system(kind, xi, {}, opts);
        }
    }
    if (g.format == "json") {
        write_out(g, solution_json(s).dump(2) + "\n");
    } else {
        write_out(g, "xi,t,q,t_prime\n" + solution_csv_row(s));
    }
    return 0;
}

int cmd_spectrum(const GlobalOpts& g, const std::string& potential, double xi_min, double xi_max,
                 int steps) {
    PotentialKind kind = parse_potential(potential);
    SolverOptions opts{g.tol, g.max_iter};
    SpectrumCurve curve = spectrum_curve(kind, xi_min, xi_max, steps, opts);
    if (g.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const SpectrumSolution& s : curve.rows) rows.push_back(solution_json(s));
        write_out(g, rows.dump(2) + "\n");
    } else {
        std::string payload = "xi,t,q,t_prime\n";
        for (const SpectrumSolution& s : curve.rows) payload += solution_csv_row(s);
        write_out(g, payload);
    }
    return 0;
}

int cmd_inflection(const GlobalOpts& g) {
    double xt = khintchine_inflection();
    double residual = 2.0 * (xt - 1.0) * std::log(xt - 1.0) - xt;
    int changes = khintchine_curvature_sign_changes(1.01, 50.0, 10000);
    if (g.format == "json") {
        ordered_json j;
        j["xi_tilde"] = jnum(xt);
        j["residual"] = jnum(residual);
        j["sign_changes"] = changes;
        write_out(g, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "xi_tilde=" << fmt17(xt) << "\n"
           << "residual=" << fmt17(residual) << "\n"
           << "sign_changes=" << changes << "\n";
        write_out(g, os.str());
    }
    return 0;
}

int cmd_sample(const GlobalOpts& g, const std::string& potential, const std::string& xi_text,
               long n_points, long depth) {
    PotentialKind kind = parse_potential(potential);
    double xi = parse_level(xi_text, kind, /*allow_inf=*/false);
    SolverOptions opts{g.tol, g.max_iter};
    SampleReport r = empirical_level_set_check(kind, xi, n_points,
                                               static_cast<std::size_t>(depth), g.seed, opts);
    SpectrumSolution s = (kind == PotentialKind::khintchine) ? khintchine_spectrum(xi)
                       : (kind == PotentialKind::lyapunov)   ? lyapunov_spectrum(xi)
                                                             : solve_system(kind, xi, {}, opts);
    if (g.format == "json") {
        ordered_json j;
        j["potential"] = potential_name(kind);
        j["xi"] = jnum(xi);
        j["t"] = jnum(s.t);
        j["q"] = jnum(s.q);
        j["n_points"] = r.n_points;
        j["depth"] = r.depth;
        j["seed"] = r.seed;
        j["birkhoff_mean"] = jnum(r.birkhoff_mean);
        j["birkhoff_stderr"] = jnum(r.birkhoff_stderr);
        j["local_dimension_mean"] = jnum(r.local_dimension_mean);
        j["local_dimension_stderr"] = jnum(r.local_dimension_stderr);
        write_out(g, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "potential=" << potential_name(kind) << "\n"
           << "xi=" << fmt17(xi) << "\n"
           << "t=" << fmt17(s.t) << "\n"
           << "q=" << fmt17(s.q) << "\n"
           << "n_points=" << r.n_points << "\n"
           << "depth=" << r.depth << "\n"
           << "seed=" << r.seed << "\n"
           << "birkhoff_mean=" << fmt17(r.birkhoff_mean) << "\n"
           << "birkhoff_stderr=" << fmt17(r.birkhoff_stderr) << "\n"
           << "local_dimension_mean=" << fmt17(r.local_dimension_mean) << "\n"
           << "local_dimension_stderr=" << fmt17(r.local_dimension_stderr) << "\n";
        write_out(g, os.str());
    }
    return 0;
}

void emit_error(const std::string& kind, const std::string& message) {
    ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p2gle: power-2-decaying digit expansions and their dimension spectra"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out", g.out, "write output to this file instead of stdout");
    CLI::Option* format_opt = app.add_option("--format", g.format, "output format")
                                  ->check(CLI::IsMember({"csv", "json"}))
                                  ->capture_default_str();
    app.add_option("--tol", g.tol, "newton convergence tolerance")->capture_default_str();
    app.add_option("--max-iter", g.max_iter, "newton iteration cap")->capture_default_str();
    app.add_option("--seed", g.seed, "sampling seed")->capture_default_str();

    std::string x_text, digits_text, tail = "unspecified", potential, xi_text;
    long depth_digits = 0, sample_points = 1000, sample_depth = 10000;
    double xi_min = 0.0, xi_max = 0.0;
    int steps = 200;

    CLI::App* enc = app.add_subcommand("encode", "digit expansion of a rational point");
    enc->fallthrough();
    enc->add_option("--x", x_text, "point in (0,1], as p/q or a finite decimal")->required();
    enc->add_option("--digits", depth_digits, "number of digits to emit")
        ->required()
        ->check(CLI::PositiveNumber);

    CLI::App* dec = app.add_subcommand("decode", "point or cylinder of a digit string");
    dec->fallthrough();
    dec->add_option("--digits", digits_text, "comma-separated digits, e.g. 1,3,1,1")->required();
    dec->add_option("--tail", tail, "tail convention")
        ->check(CLI::IsMember({"unspecified", "allones"}))
        ->capture_default_str();

    CLI::App* sol = app.add_subcommand("solve", "dimension of one spectrum level");
    sol->fallthrough();
    sol->add_option("--potential", potential, "khintchine|logdigit|expdigit|lyapunov")->required();
    sol->add_option("--xi", xi_text, "level value; 'xi0' for the typical log-digit level, 'inf' for the expdigit right edge")
        ->required();

    CLI::App* sweep = app.add_subcommand("spectrum", "sweep a spectrum over a level grid");
    sweep->fallthrough();
    sweep->add_option("--potential", potential, "khintchine|logdigit|expdigit|lyapunov")->required();
    sweep->add_option("--xi-min", xi_min, "left end of the level grid")->required();
    sweep->add_option("--xi-max", xi_max, "right end of the level grid")->required();
    sweep->add_option("--steps", steps, "number of grid rows")->capture_default_str();

    CLI::App* infl = app.add_subcommand("inflection", "inflection point of the khintchine spectrum");
    infl->fallthrough();

    CLI::App* samp = app.add_subcommand("sample", "gibbs sampling check of one spectrum level");
    samp->fallthrough();
    samp->add_option("--potential", potential, "khintchine|logdigit|expdigit|lyapunov")->required();
    samp->add_option("--xi", xi_text, "level value; 'xi0' for the typical log-digit level")->required();
    samp->add_option("--points", sample_points, "number of sampled sequences")->capture_default_str();
    samp->add_option("--depth", sample_depth, "digits per sampled sequence")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        return 1;
    }

    // sweeps are plot-ready tables: default them to csv unless asked otherwise
    if (sweep->parsed() && format_opt->count() == 0) g.format = "csv";

    try {
        if (enc->parsed()) return cmd_encode(g, x_text, depth_digits);
        if (dec->parsed()) return cmd_decode(g, digits_text, tail);
        if (sol->parsed()) return cmd_solve(g, potential, xi_text);
        if (sweep->parsed()) return cmd_spectrum(g, potential, xi_min, xi_max, steps);
        if (infl->parsed()) return cmd_inflection(g);
        if (samp->parsed()) return cmd_sample(g, potential, xi_text, sample_points, sample_depth);
        emit_error("usage", "no command given");
        return 1;
    } catch (const p2gle::convergence_error& e) {
        ordered_json j;
        j["error"] = "non-convergence";
        j["message"] = e.what();
        j["residual"] = jnum(e.residual);
        j["iterations"] = e.iterations;
        std::cerr << j.dump() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        emit_error("domain", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        emit_error("domain", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("error", e.what());
        return 1;
    }
}
