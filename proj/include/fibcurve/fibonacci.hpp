#pragma once

#include "fibcurve/numeric.hpp"

#include <utility>

namespace fibcurve {

mpz_class fib(unsigned long n);

// (f_n mod m, f_{n+1} mod m)
std::pair<mpz_class, mpz_class> fib_pair_mod(const mpz_class& n, const mpz_class& m);

std::uint64_t pisano_period(std::uint64_t m);

struct FibContext {
    unsigned long q = 0;
    mpz_class f_q;
    unsigned long e = 0;  // f_q - 1 = 2^e * m
    mpz_class m;

    explicit FibContext(unsigned long index);
};

bool is_pipeline_index(unsigned long q);  // odd prime > 3

// Legendre symbol (f_q | ell) through the Pisano period of ell.
int legendre_fib(std::uint64_t ell, const FibContext& ctx);

// s = f_{(q+1)/2} / f_{(q-1)/2} mod f_q, which squares to -1 when f_q is prime.
OrComposite<mpz_class> cassini_sqrt_minus_one(const FibContext& ctx);

bool binet_check_mod(unsigned long n, const mpz_class& p);

}  // namespace fibcurve
