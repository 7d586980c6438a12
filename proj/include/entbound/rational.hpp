#pragma once

// Exact rational numbers with an int64 fast path.
//
// Values whose reduced numerator and denominator both fit in 62 bits are kept
// inline; anything larger is promoted to a GMP mpq_class and demoted again as
// soon as it fits. All intermediate small-path arithmetic is done in __int128,
// so it never overflows.

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "error.hpp"

namespace entbound {

class Rational {
    using i128 = __int128;
    using u128 = unsigned __int128;
    static constexpr std::int64_t kLimit = std::int64_t{1} << 62;

public:
    Rational() noexcept = default;
    Rational(int v) noexcept : num_(v) {}
    Rational(long v) : Rational(static_cast<long long>(v)) {}
    Rational(long long v) { assign_reduced(static_cast<i128>(v), 1); }
    Rational(long long n, long long d)
    {
        if (d == 0)
            throw Error(ErrorKind::OutOfRange, "zero denominator");
        assign_unreduced(static_cast<i128>(n), static_cast<i128>(d));
    }
    explicit Rational(const mpq_class& q) { assign_mpq(q); }

    Rational(const Rational& o) : num_(o.num_), den_(o.den_)
    {
        if (o.big_)
            big_ = std::make_unique<mpq_class>(*o.big_);
    }
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& o)
    {
        if (this != &o) {
            num_ = o.num_;
            den_ = o.den_;
            big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
        }
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;

    /// Parses "a", "a/b", "-a/b" or a finite decimal such as "0.125".
    static Rational parse(std::string_view text)
    {
        std::string s(text);
        auto trim = [](std::string& t) {
            while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front())))
                t.erase(t.begin());
            while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back())))
                t.pop_back();
        };
        trim(s);
        if (s.empty())
            throw Error(ErrorKind::ParseError, "empty rational");
        try {
            if (auto dot = s.find('.'); dot != std::string::npos && s.find('/') == std::string::npos) {
                std::string digits = s.substr(0, dot) + s.substr(dot + 1);
                std::size_t frac = s.size() - dot - 1;
                if (digits.empty() || digits == "-" || digits == "+")
                    throw Error(ErrorKind::ParseError, "bad decimal '" + s + "'");
                if (digits.front() == '+')
                    digits.erase(digits.begin());
                for (std::size_t i = digits.front() == '-' ? 1 : 0; i < digits.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(digits[i])))
                        throw Error(ErrorKind::ParseError, "bad decimal '" + s + "'");
                mpz_class num(digits, 10);
                mpz_class den;
                mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
                return Rational(mpq_class(num, den));
            }
            for (char c : s)
                if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
                    throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
            if (s.front() == '+')
                s.erase(s.begin());
            mpq_class q(s, 10);
            if (q.get_den() == 0)
                throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
            q.canonicalize();
            return Rational(q);
        } catch (const std::invalid_argument&) {
            throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
        }
    }

    /// Nearest multiple of 2^-bits.
    static Rational round_dyadic(double v, int bits)
    {
        double scaled = std::nearbyint(std::ldexp(v, bits));
        mpz_class num;
        mpz_set_d(num.get_mpz_t(), scaled);
        mpz_class den = 1;
        den <<= bits;
        return Rational(mpq_class(num, den));
    }

    /// Smallest multiple of 2^-bits that is >= v.
    static Rational ceil_dyadic(double v, int bits)
    {
        double scaled = std::ceil(std::ldexp(v, bits));
        mpz_class num;
        mpz_set_d(num.get_mpz_t(), scaled);
        mpz_class den = 1;
        den <<= bits;
        return Rational(mpq_class(num, den));
    }

    bool is_zero() const noexcept { return !big_ && num_ == 0; }
    int sign() const noexcept
    {
        if (big_)
            return sgn(*big_);
        return (num_ > 0) - (num_ < 0);
    }
    bool is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

    double to_double() const
    {
        if (big_)
            return big_->get_d();
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    mpq_class to_mpq() const
    {
        if (big_)
            return *big_;
        mpq_class q;
        mpq_set_si(q.get_mpq_t(), num_, static_cast<unsigned long>(den_));
        return q;
    }

    std::string str() const
    {
        if (big_)
            return big_->get_str();
        if (den_ == 1)
            return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    Rational operator-() const
    {
        if (big_)
            return Rational(mpq_class(-*big_));
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational abs() const { return sign() < 0 ? -*this : *this; }

    Rational reciprocal() const
    {
        if (is_zero())
            throw Error(ErrorKind::OutOfRange, "reciprocal of zero");
        if (big_)
            return Rational(mpq_class(1 / *big_));
        Rational r;
        r.num_ = num_ < 0 ? -den_ : den_;
        r.den_ = num_ < 0 ? -num_ : num_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        if (!a.big_ && !b.big_) {
            if (a.num_ == 0)
                return b;
            if (b.num_ == 0)
                return a;
            Rational r;
            if (a.den_ == b.den_) {
                i128 n = static_cast<i128>(a.num_) + b.num_;
                if (a.den_ == 1)
                    r.assign_reduced(n, 1);
                else
                    r.assign_unreduced(n, a.den_);
            } else {
                i128 n = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
                r.assign_unreduced(n, static_cast<i128>(a.den_) * b.den_);
            }
            return r;
        }
        return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
    }

    friend Rational operator-(const Rational& a, const Rational& b)
    {
        if (!b.big_) {
            Rational nb;
            nb.num_ = -b.num_;
            nb.den_ = b.den_;
            return a + nb;
        }
        return Rational(mpq_class(a.to_mpq() - b.to_mpq()));
    }

    friend Rational operator*(const Rational& a, const Rational& b)
    {
        if (!a.big_ && !b.big_) {
            if (a.num_ == 0 || b.num_ == 0)
                return Rational();
            if (a.den_ == 1 && b.den_ == 1) {
                Rational r;
                r.assign_reduced(static_cast<i128>(a.num_) * b.num_, 1);
                return r;
            }
            std::int64_t g1 = std::gcd(a.num_, b.den_);
            std::int64_t g2 = std::gcd(b.num_, a.den_);
            i128 n = static_cast<i128>(a.num_ / g1) * (b.num_ / g2);
            i128 d = static_cast<i128>(a.den_ / g2) * (b.den_ / g1);
            Rational r;
            r.assign_reduced(n, d);
            return r;
        }
        return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
    }

    friend Rational operator/(const Rational& a, const Rational& b) { return a * b.reciprocal(); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b)
    {
        if (!a.big_ && !b.big_)
            return a.num_ == b.num_ && a.den_ == b.den_;
        if (a.big_ && b.big_)
            return *a.big_ == *b.big_;
        return false; // canonical: a value is big only if it does not fit
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        if (!a.big_ && !b.big_) {
            i128 l = static_cast<i128>(a.num_) * b.den_;
            i128 r = static_cast<i128>(b.num_) * a.den_;
            return l < r ? std::strong_ordering::less
                         : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
        }
        int c = cmp(a.to_mpq(), b.to_mpq());
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    std::size_t hash() const
    {
        if (big_)
            return std::hash<std::string>{}(big_->get_str());
        return std::hash<std::int64_t>{}(num_) * 31u + std::hash<std::int64_t>{}(den_);
    }

private:
    static u128 uabs(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

    static u128 gcd128(u128 a, u128 b)
    {
        if ((a >> 64) == 0 && (b >> 64) == 0)
            return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
        while (b != 0) {
            u128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static mpz_class to_mpz(i128 v)
    {
        u128 m = uabs(v);
        std::uint64_t words[2] = {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(m >> 64)};
        mpz_class z;
        mpz_import(z.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
        if (v < 0)
            z = -z;
        return z;
    }

    static bool fits(i128 v) { return v <= kLimit && v >= -kLimit; }

    // n/d already in lowest terms, d != 0.
    void assign_reduced(i128 n, i128 d)
    {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        if (fits(n) && d <= kLimit) {
            num_ = static_cast<std::int64_t>(n);
            den_ = static_cast<std::int64_t>(d);
            big_.reset();
        } else {
            mpq_class q(to_mpz(n), to_mpz(d));
            big_ = std::make_unique<mpq_class>(std::move(q));
            num_ = 0;
            den_ = 1;
        }
    }

    void assign_unreduced(i128 n, i128 d)
    {
        if (n == 0) {
            num_ = 0;
            den_ = 1;
            big_.reset();
            return;
        }
        u128 g = gcd128(uabs(n), uabs(d));
        if (g > 1) {
            n /= static_cast<i128>(g);
            d /= static_cast<i128>(g);
        }
        assign_reduced(n, d);
    }

    void assign_mpq(const mpq_class& q)
    {
        const mpz_class& n = q.get_num();
        const mpz_class& d = q.get_den();
        if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 62 && mpz_sizeinbase(d.get_mpz_t(), 2) <= 62) {
            num_ = mpz_get_si(n.get_mpz_t());
            den_ = mpz_get_si(d.get_mpz_t());
            big_.reset();
        } else {
            big_ = std::make_unique<mpq_class>(q);
            num_ = 0;
            den_ = 1;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::unique_ptr<mpq_class> big_;
};

} // namespace entbound

template <>
struct std::hash<entbound::Rational> {
    std::size_t operator()(const entbound::Rational& r) const { return r.hash(); }
};
