#include "p2gle/expansion.hpp"

#include <cstdlib>
#include <stdexcept>

namespace p2gle {

namespace {

void check_unit_interval(const Rational& x) {
    if (x.raw() <= 0 || x.raw() > 1)
        throw std::domain_error("expansion input must lie in (0, 1]");
}

void check_digits(const DigitSequence& d) {
    if (d.digits.empty()) throw std::domain_error("digit sequence is empty");
    for (auto v : d.digits)
        if (v < 1) throw std::domain_error("digits must be positive");
}

}  // namespace

std::int64_t first_digit(const Rational& x) {
    check_unit_interval(x);
    // For x = p/q the branch index is the bit length of floor(q/p): the
    // interval convention (2^-n, 2^-(n-1)] makes this exact even at dyadic
    // points, where the bit length of 2^k is k+1.
    mpz_class m = x.den() / x.num();
    return static_cast<std::int64_t>(mpz_sizeinbase(m.get_mpz_t(), 2));
}

Rational apply_T(const Rational& x) {
    std::int64_t d = first_digit(x);
    mpq_class r = x.raw();
    r *= mpz_class(mpz_class(1) << static_cast<unsigned long>(d));
    r -= 1;
    return Rational(r);
}

DigitSequence encode(const Rational& x, std::size_t depth) {
    check_unit_interval(x);
    DigitSequence out;
    out.digits.reserve(depth);
    Rational y = x;
    for (std::size_t i = 0; i < depth; ++i) {
        std::int64_t d = first_digit(y);
        out.digits.push_back(d);
        y = apply_T(y);
    }
    return out;
}

CylinderInterval cylinder(const DigitSequence& d) {
    check_digits(d);
    mpq_class acc = 0;
    long shift = 0;
    for (auto v : d.digits) {
        shift += static_cast<long>(v);
        acc += Rational::pow2(-shift).raw();
    }
    CylinderInterval out;
    out.left = Rational(acc);
    out.right = Rational(mpq_class(acc + Rational::pow2(-shift).raw()));
    out.depth = d.digits.size();
    return out;
}

std::variant<Rational, CylinderInterval> decode(const DigitSequence& d) {
    CylinderInterval c = cylinder(d);
    if (d.tail == Tail::all_ones) return c.right;
    return c;
}

Rational periodic_point(const std::vector<std::int64_t>& period) {
    DigitSequence d;
    d.digits = period;
    check_digits(d);
    long s = 0;
    mpq_class partial = 0;
    for (auto v : period) {
        s += static_cast<long>(v);
        partial += Rational::pow2(-s).raw();
    }
    // y = partial + 2^-s * y
    mpz_class two_s = mpz_class(1) << static_cast<unsigned long>(s);
    mpq_class y = partial * two_s / mpq_class(two_s - 1);
    return Rational(y);
}

std::string format_digits(const DigitSequence& d) {
    std::string out;
    for (std::size_t i = 0; i < d.digits.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(d.digits[i]);
    }
    return out;
}

DigitSequence parse_digits(const std::string& text) {
    DigitSequence out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        std::string tok = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (tok.empty()) throw std::domain_error("empty digit in '" + text + "'");
        char* end = nullptr;
        errno = 0;
        long long v = std::strtoll(tok.c_str(), &end, 10);
        if (errno != 0 || end == tok.c_str() || *end != '\0' || v < 1)
            throw std::domain_error("cannot parse digit '" + tok + "'");
        out.digits.push_back(v);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.digits.empty()) throw std::domain_error("digit sequence is empty");
    return out;
}

}
