#pragma once

#include "p2gle/potential.hpp"

namespace p2gle {

struct PressurePoint {
    double t = 0.0;
    double q = 0.0;
    PotentialKind kind = PotentialKind::khintchine;
    bool in_domain = false;
};

// Pressure value with analytic partial derivatives and the truncation
// certificate of the series evaluation. Closed-form paths report
// truncation_N = 0 and tail_bound = 0; series paths record the number of
// summed terms and a relative bound on everything dropped. Divergent moments
// (possible on the q = 0 / t = 0 edges) are reported as +-infinity.
struct PressureEval {
    double value = 0.0;
    double dP_dt = 0.0;
    double dP_dq = 0.0;
    double d2P_dq2 = 0.0;
    double d2P_dtdq = 0.0;
    double d2P_dt2 = 0.0;
    long truncation_N = 0;
    double tail_bound = 0.0;
};

struct SeriesOptions {
    double eps_rel = 1e-17;     // per-term and tail-bound threshold, relative to the running sum
    long max_terms = 20000000;  // iteration cap; exceeding it raises convergence_error
};

// Domains:
//   khintchine: q - t*log2 < 0
//   log_digit:  t > 0, or t = 0 with q < -1
//   exp_digit:  (t > 0 and q <= 0) or (t >= 0 and q < 0)
//   lyapunov:   q < t   (alias of khintchine at q*log2)
bool pressure_in_domain(PotentialKind kind, double t, double q);
PressurePoint classify_point(PotentialKind kind, double t, double q);

PressureEval pressure_khintchine(double t, double q);
PressureEval pressure_logdigit(double t, double q, const SeriesOptions& opts = {});
PressureEval pressure_expdigit(double t, double q, const SeriesOptions& opts = {});
PressureEval pressure(PotentialKind kind, double t, double q, const SeriesOptions& opts = {});

// Raw series evaluation of the log-digit pressure, valid anywhere in t > 0.
// pressure_logdigit switches to a wide-peak closed form when the summand is a
// broad bump; this entry point stays on the literal sum so the two regimes can
// be cross-validated against each other.
PressureEval pressure_logdigit_series(double t, double q, const SeriesOptions& opts = {});

// Riemann zeta for s > 1, absolute error well under 1e-12.
double zeta(double s);

}
