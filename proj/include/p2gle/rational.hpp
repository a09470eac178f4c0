#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>

namespace p2gle {

// Arbitrary-precision rational, kept reduced with positive denominator.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long num, long den = 1);
    Rational(const mpz_class& num, const mpz_class& den);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    // Accepts "p/q" or a finite decimal string such as "0.625"; conversion is exact.
    static Rational parse(const std::string& text);

    // 2^k for any integer k; negative k gives 1/2^|k|.
    static Rational pow2(long k);

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    std::string str() const { return v_.get_str(); }
    double to_double() const { return v_.get_d(); }

    friend Rational operator+(const Rational& a, const Rational& b) { return from_canonical(a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return from_canonical(a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return from_canonical(a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b);

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

private:
    static Rational from_canonical(mpq_class v) {
        Rational r;
        r.v_ = std::move(v);  // mpq arithmetic keeps results canonical
        return r;
    }
    mpq_class v_;
};

}
