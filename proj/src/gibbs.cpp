#include "p2gle/gibbs.hpp"

#include "p2gle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace p2gle {

namespace {

const double kLog2 = std::log(2.0);
const long kSupportCap = 5000000;

struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        c += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

void finalize_cdf(DigitDistribution& d) {
    d.cdf.resize(d.pmf.size());
    Kahan acc;
    for (std::size_t i = 0; i < d.pmf.size(); ++i) {
        acc.add(d.pmf[i]);
        d.cdf[i] = acc.get();
    }
    d.cdf.back() = 1.0;
}

// Exactly geometric digit law p_n = (1-r) r^(n-1), truncated where the tail
// fraction r^N drops below 1e-15 and renormalized by 1 - r^N.
DigitDistribution geometric_distribution(PotentialKind kind, double t, double q, double r) {
    if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("digit law needs a ratio in (0,1)");
    double lr = std::log(r);
    long N = static_cast<long>(std::ceil(std::log(1e-15) / lr));
    if (N < 1) N = 1;
    if (N > kSupportCap)
        throw convergence_error("digit law support exceeds the materialization cap", r, N);
    double rN = std::exp(N * lr);
    double log_norm = std::log1p(-r) - std::log1p(-rN);
    DigitDistribution d;
    d.kind = kind;
    d.t = t;
    d.q = q;
    d.support_cap = N;
    d.tail_mass_bound = rN;
    d.pmf.resize(static_cast<std::size_t>(N));
    d.log_pmf.resize(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) {
        double lp = log_norm + static_cast<double>(i) * lr;
        d.log_pmf[static_cast<std::size_t>(i)] = lp;
        d.pmf[static_cast<std::size_t>(i)] = std::exp(lp);
    }
    finalize_cdf(d);
    return d;
}

// Series digit law p_n = exp(a_n - P); truncation is certified by the same
// geometric tail majorant the pressure engine uses, against total mass 1.
DigitDistribution series_distribution(PotentialKind kind, double t, double q) {
    PressureEval e = pressure(kind, t, q);
    DigitDistribution d;
    d.kind = kind;
    d.t = t;
    d.q = q;
    double qp = std::max(q, 0.0);
    Kahan mass;
    for (long n = 1;; ++n) {
        if (n > kSupportCap)
            throw convergence_error("digit law support exceeds the materialization cap",
                                    mass.get(), n);
        double f = potential_value(kind, n);
        double lp = -static_cast<double>(n) * t * kLog2 + q * f - e.value;
        double w = std::exp(lp);
        d.log_pmf.push_back(lp);
        d.pmf.push_back(w);
        mass.add(w);
        double rho = (kind == PotentialKind::log_digit)
                         ? std::exp2(-t) * std::pow((n + 1.0) / n, qp)
                         : std::exp2(-t) * std::exp(q * f);
        if (!(rho < 1.0)) continue;
        if (w * rho / (1.0 - rho) <= 1e-15 && w <= 1e-10) {
            d.support_cap = n;
            d.tail_mass_bound = w * rho / (1.0 - rho);
            break;
        }
    }
    // renormalize over the kept support
    double S = mass.get();
    double logS = std::log(S);
    for (std::size_t i = 0; i < d.pmf.size(); ++i) {
        d.pmf[i] /= S;
        d.log_pmf[i] -= logS;
    }
    finalize_cdf(d);
    return d;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

std::uint64_t SplitMix64::next() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
}

double SplitMix64::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

DigitDistribution digit_distribution(PotentialKind kind, double t, double q) {
    if (!pressure_in_domain(kind, t, q))
        throw std::domain_error("digit law parameters are outside the pressure domain");
    switch (kind) {
        case PotentialKind::khintchine:
            return geometric_distribution(kind, t, q, std::exp2(q / kLog2 - t));
        case PotentialKind::lyapunov:
            return geometric_distribution(kind, t, q, std::exp2(q - t));
        case PotentialKind::log_digit:
        case PotentialKind::exp_digit:
            return series_distribution(kind, t, q);
    }
    throw std::domain_error("unknown potential kind");
}

DigitSequence sample_digits(const DigitDistribution& dist, std::size_t depth, std::uint64_t seed) {
    if (dist.cdf.empty()) throw std::domain_error("empty digit law");
    SplitMix64 gen{seed};
    DigitSequence seq;
    seq.digits.reserve(depth);
    for (std::size_t j = 0; j < depth; ++j) {
        double u = gen.next_double();
        auto it = std::upper_bound(dist.cdf.begin(), dist.cdf.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - dist.cdf.begin());
        if (idx >= dist.cdf.size()) idx = dist.cdf.size() - 1;
        seq.digits.push_back(static_cast<std::int64_t>(idx) + 1);
    }
    return seq;
}

double birkhoff_average(const DigitSequence& d, PotentialKind kind) {
    if (d.digits.empty()) throw std::domain_error("birkhoff average of an empty sequence");
    Kahan acc;
    for (std::int64_t n : d.digits) acc.add(potential_value(kind, n));
    return acc.get() / static_cast<double>(d.digits.size());
}

double local_dimension(const DigitSequence& d, const DigitDistribution& dist) {
    if (d.digits.empty()) throw std::domain_error("local dimension of an empty sequence");
    Kahan logp;
    double digit_sum = 0.0;
    for (std::int64_t n : d.digits) {
        if (n < 1) throw std::domain_error("digits must be >= 1");
        if (n > dist.support_cap)
            throw support_error("digit exceeds the truncated support of the sampling law");
        logp.add(dist.log_pmf[static_cast<std::size_t>(n - 1)]);
        digit_sum += static_cast<double>(n);
    }
    return logp.get() / (-kLog2 * digit_sum);
}

SampleReport empirical_level_set_check(PotentialKind kind, double xi, long n_points,
                                       std::size_t depth, std::uint64_t seed,
                                       const SolverOptions& opts) {
    if (n_points < 2) throw std::domain_error("need at least two sample points");
    if (depth == 0) throw std::domain_error("need positive depth");
    SpectrumSolution sol = solve_system(kind, xi, {}, opts);
    DigitDistribution dist = digit_distribution(kind, sol.t, sol.q);

    std::vector<double> birk(static_cast<std::size_t>(n_points));
    std::vector<double> locd(static_cast<std::size_t>(n_points));
    for (long i = 0; i < n_points; ++i) {
        std::uint64_t stream =
            mix64(seed ^ (static_cast<std::uint64_t>(i) + 1) * 0xD1B54A32D192ED03ULL);
        DigitSequence seq = sample_digits(dist, depth, stream);
        birk[static_cast<std::size_t>(i)] = birkhoff_average(seq, kind);
        locd[static_cast<std::size_t>(i)] = local_dimension(seq, dist);
    }

    auto mean_se = [n_points](const std::vector<double>& v) {
        Kahan m;
        for (double x : v) m.add(x);
        double mean = m.get() / static_cast<double>(n_points);
        Kahan s2;
        for (double x : v) s2.add((x - mean) * (x - mean));
        double var = s2.get() / static_cast<double>(n_points - 1);
        return std::pair<double, double>(mean, std::sqrt(var / static_cast<double>(n_points)));
    };

    SampleReport r;
    r.n_points = n_points;
    r.depth = static_cast<long>(depth);
    r.seed = seed;
    auto [bm, bs] = mean_se(birk);
    auto [lm, ls] = mean_se(locd);
    r.birkhoff_mean = bm;
    r.birkhoff_stderr = bs;
    r.local_dimension_mean = lm;
    r.local_dimension_stderr = ls;
    return r;
}

}
