#pragma once

#include "p2gle/expansion.hpp"
#include "p2gle/potential.hpp"
#include "p2gle/spectrum.hpp"

#include <cstdint>
#include <vector>

namespace p2gle {

// SplitMix64: state advances by the golden-ratio gamma, outputs pass through
// the xor-shift-multiply finalizer. Fixed here as the reproducibility
// contract: identical (seed, parameters) give identical samples on every
// platform. Doubles take the top 53 bits.
struct SplitMix64 {
    std::uint64_t state = 0;
    std::uint64_t next();
    double next_double();  // uniform in [0, 1)
};

// The SplitMix64 output finalizer; also used to derive per-stream seeds.
std::uint64_t mix64(std::uint64_t z);

// The Gibbs measure restricted to first-digit cylinders: an i.i.d. digit law
// with p_n = exp(a_n - P), a_n = -n*t*log2 + q*f(n). The support is truncated
// where the certified tail mass falls below 1e-15, then renormalized.
struct DigitDistribution {
    PotentialKind kind = PotentialKind::khintchine;
    double t = 0.0;
    double q = 0.0;
    std::vector<double> pmf;      // pmf[i] = P(digit = i+1) after renormalization
    std::vector<double> log_pmf;  // log pmf[i], computed in log space (no underflow)
    std::vector<double> cdf;      // inclusive prefix sums; back() == 1
    long support_cap = 0;
    double tail_mass_bound = 0.0;
};

DigitDistribution digit_distribution(PotentialKind kind, double t, double q);

// depth i.i.d. draws by inverse CDF over the cached prefix sums.
DigitSequence sample_digits(const DigitDistribution& dist, std::size_t depth, std::uint64_t seed);

// (1/n) * sum f(d_j) with f per kind; compensated summation (exp_digit values
// span many orders of magnitude).
double birkhoff_average(const DigitSequence& d, PotentialKind kind);

// Depth-n local dimension quotient sum_j log p_{d_j} / (-log2 * sum_j d_j),
// using the exact cylinder length 2^-(sum d). Throws support_error if a digit
// exceeds the pmf cap.
double local_dimension(const DigitSequence& d, const DigitDistribution& dist);

struct SampleReport {
    long n_points = 0;
    long depth = 0;
    std::uint64_t seed = 0;
    double birkhoff_mean = 0.0;
    double birkhoff_stderr = 0.0;
    double local_dimension_mean = 0.0;
    double local_dimension_stderr = 0.0;
};

// Solves (t,q) at xi, materializes the digit law, samples n_points sequences
// of the given depth, and reports mean/stderr of Birkhoff averages (expected
// -> xi) and of local dimensions (expected -> t(xi)). Stream i draws from a
// generator seeded with mix64(seed ^ (i+1)*0xD1B54A32D192ED03).
SampleReport empirical_level_set_check(PotentialKind kind, double xi, long n_points,
                                       std::size_t depth, std::uint64_t seed,
                                       const SolverOptions& opts = {});

}
