#include "p2gle/spectrum.hpp"

#include "p2gle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace p2gle {

namespace {

const double kLog2 = std::log(2.0);
const double kInf = std::numeric_limits<double>::infinity();

// t(xi) = (log(xi-1)/xi - log((xi-1)/xi)) / log2, arranged per branch so the
// small factor is never produced by cancellation: near xi = 1 the form
// -u*log(u)/xi + log1p(u) keeps both addends positive.
double kh_t(double xi) {
    double u = xi - 1.0;
    if (u <= 0.5) return (-u * std::log(u) / xi + std::log1p(u)) / kLog2;
    return (std::log(u) / xi - std::log1p(-1.0 / xi)) / kLog2;
}

double kh_q(double xi) { return std::log(xi - 1.0) / xi; }

// + 0.0 normalizes the signed zero at xi = 2
double kh_tprime(double xi) { return -std::log(xi - 1.0) / (xi * xi * kLog2) + 0.0; }

double solve_admissible_floor(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::khintchine: return 1.0;
        case PotentialKind::log_digit: return 0.0;
        case PotentialKind::exp_digit: return 2.0;
        case PotentialKind::lyapunov: return kLog2;
    }
    throw std::domain_error("unknown potential kind");
}

struct NewtonOut {
    double t, q;
    double rP, rQ;
    double dP_dt;
    int iterations;
};

NewtonOut newton_solve(PotentialKind kind, double xi, double t0, double q0,
                       const SolverOptions& opts) {
    if (!pressure_in_domain(kind, t0, q0))
        throw std::domain_error("initial point is outside the pressure domain");
    SeriesOptions sopts;
    double t = t0, q = q0;
    PressureEval e = pressure(kind, t, q, sopts);
    double F1 = e.value - q * xi;
    double F2 = e.dP_dq - xi;
    double fn = std::max(std::fabs(F1), std::fabs(F2));
    int it = 0;
    while (!(fn <= opts.tol)) {
        if (it >= opts.max_iterations)
            throw convergence_error("newton iteration hit its cap before reaching tolerance", fn, it);
        double J11 = e.dP_dt, J12 = e.dP_dq - xi;
        double J21 = e.d2P_dtdq, J22 = e.d2P_dq2;
        double det = J11 * J22 - J12 * J21;
        if (!(std::isfinite(det)) || det == 0.0)
            throw convergence_error("singular jacobian in newton step", fn, it);
        double dt = -(J22 * F1 - J12 * F2) / det;
        double dq = -(-J21 * F1 + J11 * F2) / det;
        bool accepted = false;
        double lam = 1.0;
        for (int h = 0; h < 60; ++h, lam *= 0.5) {
            double tn = t + lam * dt, qn = q + lam * dq;
            if (!pressure_in_domain(kind, tn, qn)) continue;
            PressureEval en;
            try {
                en = pressure(kind, tn, qn, sopts);
            } catch (const convergence_error&) {
                continue;  // trial point too extreme for the series; shorten the step
            }
            double G1 = en.value - qn * xi;
            double G2 = en.dP_dq - xi;
            if (!std::isfinite(G1) || !std::isfinite(G2)) continue;
            double gn = std::max(std::fabs(G1), std::fabs(G2));
            if (gn < fn) {
                t = tn;
                q = qn;
                e = en;
                F1 = G1;
                F2 = G2;
                fn = gn;
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted)
            throw convergence_error("newton damping could not reduce the residual", fn, it);
    }
    return {t, q, std::fabs(F1), std::fabs(F2), e.dP_dt, it};
}

SpectrumSolution pack(PotentialKind, double xi, const NewtonOut& n) {
    SpectrumSolution s;
    s.xi = xi;
    s.t = n.t;
    s.q = n.q;
    s.t_prime = n.q / n.dP_dt + 0.0;
    s.residual_P = n.rP;
    s.residual_dPdq = n.rQ;
    s.iterations = n.iterations;
    s.method = SolveMethod::newton;
    return s;
}

}  // namespace

SpectrumSolution khintchine_spectrum(double xi) {
    if (!(xi >= 1.0)) throw std::domain_error("khintchine spectrum needs xi >= 1");
    SpectrumSolution s;
    s.xi = xi;
    s.method = SolveMethod::closed_form;
    if (xi == 1.0) {
        s.t = 0.0;
        s.q = -kInf;
        s.t_prime = kInf;
        return s;
    }
    s.t = kh_t(xi);
    s.q = kh_q(xi);
    s.t_prime = kh_tprime(xi);
    PressureEval e = pressure_khintchine(s.t, s.q);
    s.residual_P = std::fabs(e.value - s.q * xi);
    s.residual_dPdq = std::fabs(e.dP_dq - xi);
    return s;
}

double khintchine_second_derivative(double xi) {
    if (!(xi > 1.0)) throw std::domain_error("t'' needs xi > 1");
    double u = xi - 1.0;
    return (2.0 * u * std::log(u) - xi) / (xi * xi * xi * u * kLog2);
}

double khintchine_inflection() {
    auto f = [](double x) { return 2.0 * (x - 1.0) * std::log(x - 1.0) - x; };
    double lo = 3.0, hi = 1.0 + std::exp(1.0);
    for (;;) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) return mid;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
}

int khintchine_curvature_sign_changes(double lo, double hi, int points) {
    if (!(lo > 1.0) || !(hi > lo) || points < 2)
        throw std::domain_error("sign scan needs 1 < lo < hi and at least two points");
    int changes = 0;
    double prev = 0.0;
    for (int i = 0; i < points; ++i) {
        double x = lo + (hi - lo) * i / (points - 1);
        double v = khintchine_second_derivative(x);
        if (i > 0 && prev * v < 0.0) ++changes;
        if (v != 0.0) prev = v;
    }
    return changes;
}

SpectrumSolution lyapunov_spectrum(double beta) {
    if (!(beta >= kLog2)) throw std::domain_error("lyapunov spectrum needs beta >= log2");
    SpectrumSolution s;
    s.xi = beta;
    s.method = SolveMethod::closed_form;
    if (beta == kLog2) {
        s.t = 0.0;
        s.q = -kInf;
        s.t_prime = kInf;
        return s;
    }
    double xi = beta / kLog2;
    s.t = kh_t(xi);
    s.q = kh_q(xi) / kLog2;
    s.t_prime = kh_tprime(xi) / kLog2;
    PressureEval e = pressure(PotentialKind::lyapunov, s.t, s.q);
    s.residual_P = std::fabs(e.value - s.q * beta);
    s.residual_dPdq = std::fabs(e.dP_dq - beta);
    return s;
}

SpectrumSolution solve_system(PotentialKind kind, double xi, std::optional<PressurePoint> initial,
                              const SolverOptions& opts) {
    double floor = solve_admissible_floor(kind);
    if (!(xi > floor) || !std::isfinite(xi)) {
        std::ostringstream os;
        os << "level " << xi << " is outside the solvable range of " << potential_name(kind)
           << " (needs xi > " << floor << ")";
        throw std::domain_error(os.str());
    }

    if (initial) return pack(kind, xi, newton_solve(kind, xi, initial->t, initial->q, opts));

    switch (kind) {
        case PotentialKind::khintchine: {
            SpectrumSolution c = khintchine_spectrum(xi);
            return pack(kind, xi, newton_solve(kind, xi, c.t, c.q, opts));
        }
        case PotentialKind::lyapunov: {
            SpectrumSolution c = lyapunov_spectrum(xi);
            return pack(kind, xi, newton_solve(kind, xi, c.t, c.q, opts));
        }
        case PotentialKind::log_digit: {
            // (t,q) = (1,0) solves the system exactly at the typical level
            // xi0; walk the level geometrically from there to the target.
            double xi0 = logdigit_xi0();
            double t = 1.0, q = 0.0;
            int total = 0;
            int m = static_cast<int>(std::ceil(std::fabs(std::log(xi / xi0)) / 0.30));
            NewtonOut n{t, q, 0.0, 0.0, 0.0, 0};
            if (m == 0) m = 1;
            for (int j = 1; j <= m; ++j) {
                double target = (j == m) ? xi : xi0 * std::pow(xi / xi0, static_cast<double>(j) / m);
                n = newton_solve(kind, target, t, q, opts);
                t = n.t;
                q = n.q;
                total += n.iterations;
            }
            n.iterations = total;
            return pack(kind, xi, n);
        }
        case PotentialKind::exp_digit: {
            // Anchor guess (t,q) = (1/2,-1) sits near the level xi_a ~ 2.18;
            // continue geometrically above it (q shrinks like 2^-xi) and in
            // short linear steps through the steep stretch below it.
            double t = 0.5, q = -1.0;
            SeriesOptions sopts;
            double xi_a = pressure_expdigit(t, q, sopts).dP_dq;
            std::vector<double> targets;
            if (xi >= xi_a) {
                int m = static_cast<int>(std::ceil(std::log(xi / xi_a) / 0.30));
                if (m == 0) m = 1;
                for (int j = 1; j <= m; ++j)
                    targets.push_back((j == m) ? xi : xi_a * std::pow(xi / xi_a, static_cast<double>(j) / m));
            } else {
                int m = static_cast<int>(std::ceil((xi_a - xi) / 0.05));
                if (m == 0) m = 1;
                for (int j = 1; j <= m; ++j)
                    targets.push_back((j == m) ? xi : xi_a + (xi - xi_a) * static_cast<double>(j) / m);
            }
            int total = 0;
            NewtonOut n{t, q, 0.0, 0.0, 0.0, 0};
            for (double target : targets) {
                n = newton_solve(kind, target, t, q, opts);
                t = n.t;
                q = n.q;
                total += n.iterations;
            }
            n.iterations = total;
            return pack(kind, xi, n);
        }
    }
    throw std::domain_error("unknown potential kind");
}

SpectrumCurve spectrum_curve(PotentialKind kind, double xi_min, double xi_max, int steps,
                             const SolverOptions& opts) {
    if (steps < 1) throw std::domain_error("spectrum needs at least one step");
    if (!(xi_min <= xi_max)) throw std::domain_error("spectrum needs xi_min <= xi_max");
    SpectrumCurve curve;
    curve.kind = kind;
    curve.rows.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        double xi = (steps == 1) ? xi_min
                  : (i == steps - 1) ? xi_max
                                     : xi_min + (xi_max - xi_min) * i / (steps - 1);
        try {
            if (curve.rows.empty()) {
                curve.rows.push_back(solve_system(kind, xi, {}, opts));
            } else {
                const SpectrumSolution& prev = curve.rows.back();
                PressurePoint warm{prev.t, prev.q, kind, true};
                try {
                    curve.rows.push_back(solve_system(kind, xi, warm, opts));
                } catch (const convergence_error&) {
                    curve.rows.push_back(solve_system(kind, xi, {}, opts));
                }
            }
        } catch (const convergence_error& err) {
            std::ostringstream os;
            os << "spectrum row at xi=" << xi << " failed: " << err.what();
            throw convergence_error(os.str(), err.residual, err.iterations);
        }
    }
    return curve;
}

double boundary_dimension(PotentialKind kind, BoundarySide side) {
    if (side == BoundarySide::finite_edge) return 0.0;
    if (kind == PotentialKind::exp_digit) return 1.0;
    throw std::domain_error("only the exp-digit spectrum has a pinned dimension at infinite level");
}

double logdigit_xi0() {
    double s = 0.0, c = 0.0;
    for (int n = 90; n >= 2; --n) {
        double x = std::exp2(static_cast<double>(-n)) * std::log(static_cast<double>(n));
        double t = s + x;
        c += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

}
