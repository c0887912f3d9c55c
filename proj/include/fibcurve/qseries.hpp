#pragma once

#include "fibcurve/numeric.hpp"

#include <vector>

namespace fibcurve {

// Truncated Laurent series in q with integer coefficients: c[k] is the
// coefficient of q^(low + k), and every exponent below `top` is exact.
struct Laurent {
    long low = 0;
    long top = 0;
    std::vector<mpz_class> c;

    mpz_class coeff(long n) const;  // 0 outside the stored range (n < top required)
    void set_top(long t);           // truncate / extend precision bookkeeping
};

Laurent laurent_add(const Laurent& a, const Laurent& b);
Laurent laurent_sub(const Laurent& a, const Laurent& b);
Laurent laurent_mul(const Laurent& a, const Laurent& b);
Laurent laurent_scale(const Laurent& a, const mpz_class& s);
Laurent laurent_pow(const Laurent& a, unsigned k);
Laurent laurent_constant(const mpz_class& v, long top);
// f(q) -> f(q^k)
Laurent laurent_dilate(const Laurent& a, long k);

// Power series coefficients for n < terms.
std::vector<mpz_class> e4_coefficients(std::size_t terms);
std::vector<mpz_class> euler_product_coefficients(std::size_t terms);  // prod (1 - q^n)

// j(q) exact for exponents below `top`.
Laurent j_series(long top);

}  // namespace fibcurve
