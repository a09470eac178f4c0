#pragma once

#include "p2gle/rational.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace p2gle {

// Finite digit data only determines a cylinder; an AllOnes tail pins the exact
// right endpoint (the expansion extended by 1,1,1,...).
enum class Tail { unspecified, all_ones };

struct DigitSequence {
    std::vector<std::int64_t> digits;
    Tail tail = Tail::unspecified;
};

// Half-open interval (left, right] of the points sharing a digit prefix.
// Invariant: right - left = 2^-(d1+...+dn).
struct CylinderInterval {
    Rational left;
    Rational right;
    std::size_t depth = 0;
};

// The unique n with 2^-n < x <= 2^-(n-1), decided by exact integer comparison.
// Dyadic points follow the interval convention: first_digit(2^-k) = k+1.
std::int64_t first_digit(const Rational& x);

// One step of the expansion map: 2^first_digit(x) * x - 1, exact; maps (0,1] onto (0,1].
Rational apply_T(const Rational& x);

// First `depth` digits by exact orbit iteration; tail is Unspecified.
DigitSequence encode(const Rational& x, std::size_t depth);

// AllOnes tail -> the exact point; Unspecified tail -> the cylinder interval.
std::variant<Rational, CylinderInterval> decode(const DigitSequence& d);

// The cylinder of a digit prefix regardless of its tail marker.
CylinderInterval cylinder(const DigitSequence& d);

// Exact value of the point whose digits repeat the given period forever.
// Its Khintchine exponent is exactly mean(period).
Rational periodic_point(const std::vector<std::int64_t>& period);

std::string format_digits(const DigitSequence& d);
DigitSequence parse_digits(const std::string& text);

}
