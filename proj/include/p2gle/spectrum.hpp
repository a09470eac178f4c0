#pragma once

#include "p2gle/pressure.hpp"

#include <optional>
#include <vector>

namespace p2gle {

enum class SolveMethod { closed_form, newton };

// One point of a dimension spectrum: the level value xi, the dimension t of
// the level set, the conjugate parameter q, and dt/dxi.
struct SpectrumSolution {
    double xi = 0.0;
    double t = 0.0;
    double q = 0.0;
    double t_prime = 0.0;
    double residual_P = 0.0;     // |P(t,q) - q*xi| at the returned point
    double residual_dPdq = 0.0;  // |dP/dq - xi| at the returned point
    int iterations = 0;
    SolveMethod method = SolveMethod::closed_form;
};

struct SolverOptions {
    double tol = 1e-12;      // convergence threshold on the max-norm of the system residual
    int max_iterations = 100;
};

struct SpectrumCurve {
    PotentialKind kind = PotentialKind::khintchine;
    std::vector<SpectrumSolution> rows;
};

// Closed-form Khintchine spectrum; xi = 1 returns the boundary constant t = 0.
SpectrumSolution khintchine_spectrum(double xi);

// Closed-form t''(xi) for xi > 1.
double khintchine_second_derivative(double xi);

// The unique zero of 2(xi-1)log(xi-1) - xi, bracketed in [3, 1+e], bisected to |f| < 1e-13.
double khintchine_inflection();

// Number of sign changes of t'' sampled at `points` uniform grid points of (lo, hi).
int khintchine_curvature_sign_changes(double lo, double hi, int points);

// Closed-form Lyapunov spectrum over beta >= log2; equals the Khintchine
// spectrum at xi = beta/log2 (the potential rescales by log2).
SpectrumSolution lyapunov_spectrum(double beta);

// Damped Newton on F(t,q) = (P(t,q) - q*xi, dP/dq - xi) with the analytic
// Jacobian. Without an initial point, khintchine/lyapunov start from their
// closed forms and log_digit/exp_digit continue from their anchor solutions
// toward xi; with one, a single Newton run starts there. Admissible xi:
// khintchine > 1, log_digit > 0, exp_digit > 2, lyapunov > log2.
SpectrumSolution solve_system(PotentialKind kind, double xi,
                              std::optional<PressurePoint> initial = {},
                              const SolverOptions& opts = {});

// Solves on an inclusive uniform grid of `steps` points, warm-starting each
// row from the previous one. Failures propagate with the failing xi.
SpectrumCurve spectrum_curve(PotentialKind kind, double xi_min, double xi_max, int steps,
                             const SolverOptions& opts = {});

// Dimensions at the spectrum edges, where the pressure system has no finite
// solution and the values are pinned constants: the finite edge (khintchine
// xi=1, log_digit xi=0, exp_digit xi=2, lyapunov beta=log2) has dimension 0;
// exp_digit additionally has dimension 1 at xi = infinity.
enum class BoundarySide { finite_edge, infinity };
double boundary_dimension(PotentialKind kind, BoundarySide side = BoundarySide::finite_edge);

// The Lebesgue-typical log-digit average sum_{n>=1} 2^-n log n ~= 0.5078339.
double logdigit_xi0();

}
