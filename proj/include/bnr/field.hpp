#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bnr {

/// Prime field F_p with runtime modulus. Elements are canonical residues in [0,p).
struct Fp {
    using Elem = std::int64_t;
    std::int64_t p;

    explicit Fp(std::int64_t p_ = 2) : p(p_) {
        if (p < 2) throw std::invalid_argument("Fp: modulus must be >= 2");
    }

    int characteristic() const { return static_cast<int>(p); }
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem from_int(std::int64_t n) const {
        Elem r = n % p;
        return r < 0 ? r + p : r;
    }
    bool is_zero(Elem a) const { return a == 0; }
    Elem add(Elem a, Elem b) const { return (a + b) % p; }
    Elem sub(Elem a, Elem b) const { return (a - b + p) % p; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
    Elem mul(Elem a, Elem b) const { return (a * b) % p; }
    Elem inv(Elem a) const {
        if (a == 0) throw std::domain_error("Fp: inverse of zero");
        // extended euclid
        Elem r0 = p, r1 = a, s0 = 0, s1 = 1;
        while (r1 != 0) {
            Elem q = r0 / r1;
            Elem r2 = r0 - q * r1; r0 = r1; r1 = r2;
            Elem s2 = s0 - q * s1; s0 = s1; s1 = s2;
        }
        return from_int(s0);
    }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    std::string str(Elem a) const { return std::to_string(a); }
};

/// Exact rationals (characteristic zero).
struct QQ {
    using Elem = boost::multiprecision::cpp_rational;

    int characteristic() const { return 0; }
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem from_int(std::int64_t n) const { return n; }
    bool is_zero(Elem const& a) const { return a == 0; }
    Elem add(Elem const& a, Elem const& b) const { return a + b; }
    Elem sub(Elem const& a, Elem const& b) const { return a - b; }
    Elem neg(Elem const& a) const { return -a; }
    Elem mul(Elem const& a, Elem const& b) const { return a * b; }
    Elem inv(Elem const& a) const {
        if (a == 0) throw std::domain_error("QQ: inverse of zero");
        return 1 / a;
    }
    Elem div(Elem const& a, Elem const& b) const { return a / b; }
    std::string str(Elem const& a) const { return a.str(); }
};

/// Runtime description of the coefficient field: c = 0 or a prime.
struct FieldSpec {
    int characteristic = 2;

    static bool is_prime(int n) {
        if (n < 2) return false;
        for (int d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }
    static FieldSpec parse(int c) {
        if (c != 0 && !is_prime(c))
            throw std::invalid_argument("characteristic must be 0 or prime");
        return FieldSpec{c};
    }
};

}  // namespace bnr
