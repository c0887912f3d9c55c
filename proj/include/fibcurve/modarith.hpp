#pragma once

#include "fibcurve/numeric.hpp"

#include <map>
#include <optional>
#include <utility>

namespace fibcurve {

int jacobi(const mpz_class& a, const mpz_class& n);
int kronecker(const mpz_class& a, const mpz_class& n);

mpz_class canonical_root(const mpz_class& x, const mpz_class& p);  // min(x, p - x)

mpz_class sqrt_mod_3mod4(const mpz_class& a, const mpz_class& p);
mpz_class sqrt_mod_5mod8(const mpz_class& a, const mpz_class& p);

struct SqrtTable {
    mpz_class p;
    mpz_class n;  // the non-residue used to build g
    mpz_class g;  // generator of the 2-Sylow subgroup
    unsigned long e = 0;
    mpz_class m;
    bool materialized = false;
    std::vector<mpz_class> powers;           // g^i, i < 2^e
    std::map<mpz_class, mpz_class> roots;    // g^(2k) -> g^k

    static constexpr unsigned long kMaxTableExponent = 16;
};

OrComposite<SqrtTable> ts_precompute(const mpz_class& p, const mpz_class& n);
OrComposite<mpz_class> ts_sqrt(const mpz_class& a, const SqrtTable& table);

mpz_class smallest_nonresidue(const mpz_class& p);  // over primes, via jacobi

// Dispatches on p mod 8. Throws NotASquare for non-residues.
OrComposite<mpz_class> sqrt_mod(const mpz_class& a, const mpz_class& p,
                                const SqrtTable* table = nullptr);

// All x in [0, m) with x^2 = a (mod m); m is factored by trial division with a
// probable-prime leftover. nullopt if m cannot be factored that way.
std::optional<std::vector<mpz_class>> sqrt_mod_all(const mpz_class& a, const mpz_class& m);

using Solution = std::pair<mpz_class, mpz_class>;

// One Euclidean descent from a given root r0 of -d mod m.
std::optional<Solution> cornacchia_descent(const mpz_class& d, const mpz_class& m,
                                           const mpz_class& r0);

// Primitive positive solution of x^2 + d y^2 = m with the largest x, or nullopt.
std::optional<Solution> cornacchia(const mpz_class& d, const mpz_class& m);

// x^2 + |D| y^2 = 4N for a negative discriminant D and an odd probable prime N,
// given a square root of D mod N.
std::optional<Solution> cornacchia_4n(const mpz_class& D, const mpz_class& N,
                                      const mpz_class& sqrt_D);

}  // namespace fibcurve
