#include "p2gle/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace p2gle {

namespace {

bool digits_only(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational::Rational(long num, long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.v_ == 0) throw std::domain_error("rational division by zero");
    return Rational::from_canonical(a.v_ / b.v_);
}

Rational Rational::pow2(long k) {
    mpz_class one = 1;
    if (k >= 0) return Rational(mpz_class(one << k), one);
    return Rational(one, mpz_class(one << (-k)));
}

Rational Rational::parse(const std::string& text) {
    std::string s = text;
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = (s[0] == '-');
        s.erase(0, 1);
    }

    Rational out;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string p = s.substr(0, slash);
        std::string q = s.substr(slash + 1);
        if (!digits_only(p) || !digits_only(q))
            throw std::domain_error("cannot parse rational '" + text + "'");
        mpz_class den(q);
        if (den == 0) throw std::domain_error("rational with zero denominator");
        out = Rational(mpz_class(p), den);
    } else {
        auto dot = s.find('.');
        std::string whole = (dot == std::string::npos) ? s : s.substr(0, dot);
        std::string frac = (dot == std::string::npos) ? "" : s.substr(dot + 1);
        if (whole.empty() && frac.empty())
            throw std::domain_error("cannot parse rational '" + text + "'");
        if ((!whole.empty() && !digits_only(whole)) || (!frac.empty() && !digits_only(frac)))
            throw std::domain_error("cannot parse rational '" + text + "'");
        mpz_class num(whole.empty() ? std::string("0") : whole);
        mpz_class den = 1;
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        out = Rational(num, den);
    }
    if (negative) out = Rational(0, 1) - out;
    return out;
}

}
