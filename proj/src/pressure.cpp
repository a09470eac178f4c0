#include "p2gle/pressure.hpp"

#include "p2gle/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2gle {

namespace {

const double kLog2 = std::log(2.0);
const double kInf = std::numeric_limits<double>::infinity();

// Neumaier-compensated accumulator.
struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        c += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

double digamma(double x) {
    double r = 0.0;
    while (x < 14.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    return r + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240))));
}

double trigamma(double x) {
    double r = 0.0;
    while (x < 14.0) {
        r += 1.0 / (x * x);
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    return r + inv * (1.0 + inv * (0.5 + inv * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 / 30.0)))));
}

// Wide-bump regime of the log-digit series: the summand 2^{-nt} n^q is a
// smooth peak of width sigma >> 1 towering over the n = 1 term, so the sum
// equals the Gamma integral int_0^inf x^q e^{-x t log2} dx up to errors below
// exp(-peak_excess); all moments come from polygamma functions.
PressureEval logdigit_laplace(double t, double q, double peak_excess) {
    double L = t * kLog2;
    PressureEval e;
    e.value = std::lgamma(q + 1.0) - (q + 1.0) * std::log(L);
    e.dP_dq = digamma(q + 1.0) - std::log(L);
    e.dP_dt = -(q + 1.0) / t;
    e.d2P_dq2 = trigamma(q + 1.0);
    e.d2P_dtdq = -1.0 / t;
    e.d2P_dt2 = (q + 1.0) / (t * t);
    e.truncation_N = 0;
    e.tail_bound = std::exp(-peak_excess);
    return e;
}

// t = 0 edge of the log-digit domain (q < -1): the weights are n^q, so the
// value routes through zeta and the q-derivatives through finite differences
// of log zeta; n-moments are zeta ratios, infinite when the exponent hits the
// pole. This edge trades a little derivative accuracy (~1e-7) for closed
// zeta evaluations; the t > 0 paths never come here.
PressureEval logdigit_zeta_edge(double q) {
    double s = -q;
    PressureEval e;
    double z = zeta(s);
    e.value = std::log(z);
    double h = std::min(1e-5, 0.25 * (s - 1.0));
    e.dP_dq = (std::log(zeta(s - h)) - std::log(zeta(s + h))) / (2.0 * h);
    double h2 = std::min(1e-4, 0.25 * (s - 1.0));
    e.d2P_dq2 = (std::log(zeta(s + h2)) - 2.0 * e.value + std::log(zeta(s - h2))) / (h2 * h2);
    if (s > 2.0) {
        double z1 = zeta(s - 1.0);
        e.dP_dt = -kLog2 * z1 / z;
        double h3 = std::min(1e-5, 0.25 * (s - 2.0));
        double dz1 = (zeta(s - 1.0 + h3) - zeta(s - 1.0 - h3)) / (2.0 * h3);
        double En_logn = -dz1 / z;  // E[n log n] = -zeta'(s-1)/zeta(s)
        e.d2P_dtdq = -kLog2 * (En_logn - (z1 / z) * e.dP_dq);
    } else {
        e.dP_dt = -kInf;
        e.d2P_dtdq = -kInf;
    }
    if (s > 3.0) {
        double En = zeta(s - 1.0) / z;
        e.d2P_dt2 = kLog2 * kLog2 * (zeta(s - 2.0) / z - En * En);
    } else {
        e.d2P_dt2 = kInf;
    }
    e.truncation_N = 0;
    e.tail_bound = 1e-7;
    return e;
}

// q = 0 edge of the exp-digit domain (t > 0): weights are geometric, so every
// moment is a geometric sum, divergent once the doubled functional outpaces
// the decay (E[2^n] needs t > 1, Var[2^n] needs t > 2).
PressureEval expdigit_qzero(double t) {
    double r = std::exp2(-t);
    double omr = 1.0 - r;
    PressureEval e;
    e.value = std::log(r / omr);
    e.dP_dt = -kLog2 / omr;
    e.d2P_dt2 = kLog2 * kLog2 * r / (omr * omr);
    if (t > 1.0) {
        double r2 = std::exp2(1.0 - t);
        e.dP_dq = 2.0 * omr / (1.0 - r2);                      // E[2^n]
        double EnF = 2.0 * omr / ((1.0 - r2) * (1.0 - r2));    // E[n 2^n]
        e.d2P_dtdq = -kLog2 * (EnF - e.dP_dq / omr);
        if (t > 2.0) {
            double r4 = std::exp2(2.0 - t);
            e.d2P_dq2 = 4.0 * omr / (1.0 - r4) - e.dP_dq * e.dP_dq;
        } else {
            e.d2P_dq2 = kInf;
        }
    } else {
        e.dP_dq = kInf;
        e.d2P_dq2 = kInf;
        e.d2P_dtdq = -kInf;
    }
    return e;
}

// Shared two-pass moment engine over weights w_n = exp(a(n) - M).
// fvals(n) is the digit functional; ratio_bound(n) must upper-bound the
// term ratio of every accumulated series from index n on and be decreasing.
template <class AFn, class FFn, class RhoFn>
PressureEval weighted_moments(AFn a, FFn fval, RhoFn ratio_bound, double M,
                              const SeriesOptions& opts, long hard_cap) {
    Kahan S0, Sf, Sn, Sff, Snn, Snf;
    long N = 0;
    double tail_rel = 0.0;
    for (long n = 1;; ++n) {
        if (n > opts.max_terms || n > hard_cap)
            throw convergence_error("pressure series exceeded its term cap", tail_rel, n);
        double f = fval(n);
        if (!std::isfinite(f))
            throw convergence_error("pressure series needs digits beyond double range", tail_rel, n);
        double w = std::exp(a(n) - M);
        double wn = w * static_cast<double>(n);
        double wf = (w > 0.0) ? w * f : 0.0;
        S0.add(w);
        Sf.add(wf);
        Sn.add(wn);
        Sff.add((w > 0.0) ? wf * f : 0.0);
        Snn.add(wn * static_cast<double>(n));
        Snf.add(wn * f);
        if (w > opts.eps_rel * S0.get()) continue;
        double rho = ratio_bound(n);
        if (!(rho < 1.0)) continue;
        double g = rho / (1.0 - rho);
        double rel = 0.0;
        auto track = [&](double term, double sum) {
            double d = std::fabs(sum);
            if (d < 1e-300) d = 1e-300;
            rel = std::max(rel, std::fabs(term) / d);
        };
        track(w, S0.get());
        track(wf, Sf.get());
        track(wn, Sn.get());
        track((w > 0.0) ? wf * f : 0.0, Sff.get());
        track(wn * static_cast<double>(n), Snn.get());
        track(wn * f, Snf.get());
        if (rel * (1.0 + g) <= opts.eps_rel) {
            N = n;
            tail_rel = rel * g;
            break;
        }
    }

    double s0 = S0.get();
    double Ef = Sf.get() / s0;
    double En = Sn.get() / s0;

    // Central second moments in a second pass: the raw E[x^2]-E[x]^2 route
    // cancels catastrophically when the weight bump sits far from the origin.
    Kahan Vff, Vnn, Vnf;
    for (long n = 1; n <= N; ++n) {
        double w = std::exp(a(n) - M);
        if (w == 0.0) continue;
        double df = fval(n) - Ef;
        double dn = static_cast<double>(n) - En;
        Vff.add(w * df * df);
        Vnn.add(w * dn * dn);
        Vnf.add(w * dn * df);
    }

    PressureEval e;
    e.value = std::log(s0) + M;
    e.dP_dq = Ef;
    e.dP_dt = -kLog2 * En;
    e.d2P_dq2 = Vff.get() / s0;
    e.d2P_dtdq = -kLog2 * (Vnf.get() / s0);
    e.d2P_dt2 = kLog2 * kLog2 * (Vnn.get() / s0);
    e.truncation_N = N;
    e.tail_bound = 4.0 * tail_rel;  // safety factor covering the central pass
    return e;
}

}  // namespace

double potential_value(PotentialKind kind, std::int64_t n) {
    switch (kind) {
        case PotentialKind::khintchine: return static_cast<double>(n);
        case PotentialKind::log_digit: return std::log(static_cast<double>(n));
        case PotentialKind::exp_digit: return std::exp2(static_cast<double>(n));
        case PotentialKind::lyapunov: return static_cast<double>(n) * kLog2;
    }
    throw std::domain_error("unknown potential kind");
}

const char* potential_name(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::khintchine: return "khintchine";
        case PotentialKind::log_digit: return "logdigit";
        case PotentialKind::exp_digit: return "expdigit";
        case PotentialKind::lyapunov: return "lyapunov";
    }
    throw std::domain_error("unknown potential kind");
}

PotentialKind parse_potential(const std::string& name) {
    if (name == "khintchine") return PotentialKind::khintchine;
    if (name == "logdigit") return PotentialKind::log_digit;
    if (name == "expdigit") return PotentialKind::exp_digit;
    if (name == "lyapunov") return PotentialKind::lyapunov;
    throw std::domain_error("unknown potential '" + name + "'");
}

bool pressure_in_domain(PotentialKind kind, double t, double q) {
    if (!std::isfinite(t) || !std::isfinite(q)) return false;
    switch (kind) {
        case PotentialKind::khintchine: return q - t * kLog2 < 0.0;
        case PotentialKind::log_digit: return t > 0.0 || (t == 0.0 && q < -1.0);
        case PotentialKind::exp_digit: return (t > 0.0 && q <= 0.0) || (t >= 0.0 && q < 0.0);
        case PotentialKind::lyapunov: return q < t;
    }
    return false;
}

PressurePoint classify_point(PotentialKind kind, double t, double q) {
    return PressurePoint{t, q, kind, pressure_in_domain(kind, t, q)};
}

double zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("zeta requires s > 1");
    if (s >= 55.0) return 1.0 + std::exp2(-s) + std::exp(-s * std::log(3.0));
    const int N = 20;
    double sum = 0.0;
    for (int n = N - 1; n >= 1; --n) sum += std::pow(static_cast<double>(n), -s);
    double Ns = std::pow(static_cast<double>(N), -s);
    double v = sum + N * Ns / (s - 1.0) + 0.5 * Ns;
    double N2 = static_cast<double>(N) * N;
    double c = s / N * Ns / 12.0;
    v += c;
    c = s * (s + 1) * (s + 2) * Ns / (N2 * N) / 720.0;
    v -= c;
    c = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * Ns / (N2 * N2 * N) / 30240.0;
    v += c;
    c = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6) * Ns / (N2 * N2 * N2 * N) / 1209600.0;
    v -= c;
    return v;
}

PressureEval pressure_khintchine(double t, double q) {
    if (!pressure_in_domain(PotentialKind::khintchine, t, q))
        throw std::domain_error("khintchine pressure needs q - t*log2 < 0");
    // exp2 keeps the q = 0 slice exact: r = 2^-t without a log2 round trip.
    double r = std::exp2(q / kLog2 - t);
    double omr = (r > 0.75) ? -std::expm1(q - t * kLog2) : 1.0 - r;
    if (!(omr > 0.0)) throw std::domain_error("khintchine pressure at the domain edge");
    PressureEval e;
    e.value = std::log(r / omr);
    e.dP_dq = 1.0 / omr;
    e.dP_dt = -kLog2 / omr;
    e.d2P_dq2 = r / (omr * omr);
    e.d2P_dtdq = -kLog2 * r / (omr * omr);
    e.d2P_dt2 = kLog2 * kLog2 * r / (omr * omr);
    return e;
}

PressureEval pressure_logdigit_series(double t, double q, const SeriesOptions& opts) {
    if (!(t > 0.0)) throw std::domain_error("log-digit series needs t > 0");
    double M;
    if (q > 0.0) {
        double nstar = q / (t * kLog2);
        long lo = std::max(1L, static_cast<long>(std::floor(nstar)));
        M = -t * kLog2;
        for (long n = lo; n <= lo + 1; ++n)
            M = std::max(M, -n * t * kLog2 + q * std::log(static_cast<double>(n)));
    } else {
        M = -t * kLog2;
    }
    double qp = std::max(q, 0.0);
    auto a = [t, q](long n) { return -n * t * kLog2 + q * std::log(static_cast<double>(n)); };
    auto f = [](long n) { return std::log(static_cast<double>(n)); };
    // (1+1/n)^(qp+4) dominates the term ratio of every moment series here:
    // the weight ratio is 2^-t ((n+1)/n)^q and log-factors grow slower than n.
    auto rho = [t, qp](long n) {
        return std::exp2(-t) * std::pow((n + 1.0) / n, qp + 4.0);
    };
    return weighted_moments(a, f, rho, M, opts, std::numeric_limits<long>::max());
}

PressureEval pressure_logdigit(double t, double q, const SeriesOptions& opts) {
    if (!pressure_in_domain(PotentialKind::log_digit, t, q))
        throw std::domain_error("log-digit pressure needs t > 0, or t = 0 with q < -1");
    if (t == 0.0) return logdigit_zeta_edge(q);
    if (q > 0.0) {
        double L = t * kLog2;
        double nstar = q / L;
        double sigma = std::sqrt(q + 1.0) / L;
        double peak_excess = q * (std::log(nstar) - 1.0) + L;
        if (nstar >= 1e4 && sigma >= 100.0 && peak_excess >= 50.0)
            return logdigit_laplace(t, q, peak_excess);
    }
    return pressure_logdigit_series(t, q, opts);
}

PressureEval pressure_expdigit(double t, double q, const SeriesOptions& opts) {
    if (!pressure_in_domain(PotentialKind::exp_digit, t, q))
        throw std::domain_error("exp-digit pressure needs t > 0 with q <= 0, or t >= 0 with q < 0");
    if (q == 0.0) return expdigit_qzero(t);
    double M = -t * kLog2 + q * 2.0;  // terms decrease from n = 1 for q < 0
    auto a = [t, q](long n) { return -n * t * kLog2 + q * std::exp2(static_cast<double>(n)); };
    auto f = [](long n) { return std::exp2(static_cast<double>(n)); };
    // weight ratio is exactly 2^-t e^{q 2^n}; f doubles and f^2 quadruples per
    // step, n-factors add (1+1/n) each.
    auto rho = [t, q](long n) {
        double b = 1.0 + 1.0 / n;
        return std::exp2(-t) * std::exp(q * std::exp2(static_cast<double>(n))) * 4.0 * b * b;
    };
    return weighted_moments(a, f, rho, M, opts, 1100);
}

PressureEval pressure(PotentialKind kind, double t, double q, const SeriesOptions& opts) {
    switch (kind) {
        case PotentialKind::khintchine:
            return pressure_khintchine(t, q);
        case PotentialKind::log_digit:
            return pressure_logdigit(t, q, opts);
        case PotentialKind::exp_digit:
            return pressure_expdigit(t, q, opts);
        case PotentialKind::lyapunov: {
            if (!(q < t)) throw std::domain_error("lyapunov pressure needs q < t");
            PressureEval e = pressure_khintchine(t, q * kLog2);
            e.dP_dq *= kLog2;
            e.d2P_dq2 *= kLog2 * kLog2;
            e.d2P_dtdq *= kLog2;
            return e;
        }
    }
    throw std::domain_error("unknown potential kind");
}

}
