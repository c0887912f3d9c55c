#pragma once

#include "fibcurve/numeric.hpp"

#include <vector>

namespace fibcurve {

// Dense univariate polynomial over Z/pZ, coefficients low degree first,
// kept reduced into [0, p) with no trailing zeros. The zero polynomial is empty.
struct Poly {
    std::vector<mpz_class> c;

    Poly() = default;
    explicit Poly(std::vector<mpz_class> coeffs) : c(std::move(coeffs)) {}

    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    const mpz_class& lead() const { return c.back(); }
    mpz_class coeff(std::size_t i) const { return i < c.size() ? c[i] : mpz_class(0); }
    bool operator==(const Poly&) const = default;
};

// Arithmetic mod p. Operations that need an inverse throw CompositeDetected
// when the relevant coefficient is not a unit (p is then composite).
class PolyRing {
public:
    explicit PolyRing(mpz_class p);

    const mpz_class& modulus() const { return p_; }

    Poly make(std::vector<mpz_class> coeffs) const;  // reduces and trims
    Poly constant(const mpz_class& a) const;
    Poly x() const;
    Poly x_minus(const mpz_class& a) const;

    Poly add(const Poly& a, const Poly& b) const;
    Poly sub(const Poly& a, const Poly& b) const;
    Poly neg(const Poly& a) const;
    Poly mul(const Poly& a, const Poly& b) const;
    Poly scale(const Poly& a, const mpz_class& s) const;
    Poly sqr(const Poly& a) const { return mul(a, a); }

    mpz_class inv(const mpz_class& a) const;  // throws CompositeDetected
    void divmod(const Poly& a, const Poly& b, Poly* q, Poly* r) const;
    Poly rem(const Poly& a, const Poly& b) const;
    Poly quo(const Poly& a, const Poly& b) const;
    Poly mulmod(const Poly& a, const Poly& b, const Poly& m) const;
    Poly powmod(const Poly& base, const mpz_class& e, const Poly& m) const;
    Poly monic(const Poly& a) const;
    Poly gcd(const Poly& a, const Poly& b) const;  // monic
    // inverse of a modulo m, or nullopt when gcd(a, m) != 1
    std::optional<Poly> invmod(const Poly& a, const Poly& m) const;
    Poly derivative(const Poly& a) const;
    mpz_class eval(const Poly& a, const mpz_class& x) const;
    // a(b(x)) mod m
    Poly compose_mod(const Poly& a, const Poly& b, const Poly& m) const;

    // Distinct roots in [0, p), ascending. Requires p prime.
    std::vector<mpz_class> roots(const Poly& f) const;
    // Distinct monic irreducible factors of the squarefree part of f.
    std::vector<Poly> irreducible_factors(const Poly& f) const;
    // (degree, product of the irreducible factors of that degree)
    std::vector<std::pair<int, Poly>> distinct_degree(const Poly& f) const;
    std::vector<Poly> equal_degree(const Poly& f, int d) const;

private:
    mpz_class p_;
    void trim(Poly& a) const;
};

}  // namespace fibcurve
