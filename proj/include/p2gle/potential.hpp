#pragma once

#include <cstdint>
#include <string>

namespace p2gle {

// Digit functional f(n) selecting the spectrum under study:
//   khintchine: f(n) = n          (digit average)
//   log_digit:  f(n) = log n
//   exp_digit:  f(n) = 2^n
//   lyapunov:   f(n) = n*log2     (alias; log|T'| = d1*log2 on each cylinder)
enum class PotentialKind { khintchine, log_digit, exp_digit, lyapunov };

double potential_value(PotentialKind kind, std::int64_t n);

const char* potential_name(PotentialKind kind);

// Accepts the CLI spellings: khintchine, logdigit, expdigit, lyapunov.
PotentialKind parse_potential(const std::string& name);

}
