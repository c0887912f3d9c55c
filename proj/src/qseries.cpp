#include "fibcurve/qseries.hpp"

#include <algorithm>

namespace fibcurve {

mpz_class Laurent::coeff(long n) const {
    if (n >= top) throw InternalError("Laurent::coeff beyond known precision");
    if (n < low || n - low >= static_cast<long>(c.size())) return 0;
    return c[n - low];
}

void Laurent::set_top(long t) {
    top = std::min(top, t);
    long keep = std::max(0L, top - low);
    if (static_cast<long>(c.size()) > keep) c.resize(keep);
}

namespace {

Laurent shaped(long low, long top) {
    Laurent r;
    r.low = low;
    r.top = top;
    r.c.assign(std::max(0L, top - low), 0);
    return r;
}

}  // namespace

Laurent laurent_add(const Laurent& a, const Laurent& b) {
    Laurent r = shaped(std::min(a.low, b.low), std::min(a.top, b.top));
    for (long n = r.low; n < r.top; ++n) r.c[n - r.low] = a.coeff(n) + b.coeff(n);
    return r;
}

Laurent laurent_sub(const Laurent& a, const Laurent& b) { return laurent_add(a, laurent_scale(b, -1)); }

Laurent laurent_scale(const Laurent& a, const mpz_class& s) {
    Laurent r = a;
    for (auto& v : r.c) v *= s;
    return r;
}

Laurent laurent_mul(const Laurent& a, const Laurent& b) {
    long low = a.low + b.low;
    long top = std::min(a.top + b.low, b.top + a.low);
    Laurent r = shaped(low, top);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        long ni = a.low + static_cast<long>(i);
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            long n = ni + b.low + static_cast<long>(j);
            if (n >= top) break;
            mpz_addmul(r.c[n - low].get_mpz_t(), a.c[i].get_mpz_t(), b.c[j].get_mpz_t());
        }
    }
    return r;
}

Laurent laurent_pow(const Laurent& a, unsigned k) {
    if (k == 0) return laurent_constant(1, a.top - a.low);
    Laurent r = a;
    for (unsigned i = 1; i < k; ++i) r = laurent_mul(r, a);
    return r;
}

Laurent laurent_constant(const mpz_class& v, long top) {
    Laurent r = shaped(0, top);
    if (top > 0) r.c[0] = v;
    return r;
}

Laurent laurent_dilate(const Laurent& a, long k) {
    Laurent r = shaped(a.low * k, a.top * k - (k - 1));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        long n = (a.low + static_cast<long>(i)) * k;
        if (n < r.top) r.c[n - r.low] = a.c[i];
    }
    return r;
}

std::vector<mpz_class> e4_coefficients(std::size_t terms) {
    std::vector<mpz_class> out(terms, 0);
    if (terms == 0) return out;
    out[0] = 1;
    for (std::size_t d = 1; d < terms; ++d) {
        mpz_class d3 = static_cast<unsigned long>(d);
        d3 = d3 * d3 * d3 * 240;
        for (std::size_t n = d; n < terms; n += d) out[n] += d3;
    }
    return out;
}

std::vector<mpz_class> euler_product_coefficients(std::size_t terms) {
    std::vector<mpz_class> out(terms, 0);
    // pentagonal number theorem
    if (terms) out[0] = 1;
    for (long k = 1;; ++k) {
        long n1 = k * (3 * k - 1) / 2, n2 = k * (3 * k + 1) / 2;
        if (n1 >= static_cast<long>(terms)) break;
        int sign = (k % 2 == 0) ? 1 : -1;
        out[n1] = sign;
        if (n2 < static_cast<long>(terms)) out[n2] = sign;
    }
    return out;
}

Laurent j_series(long top) {
    if (top < 1) throw DomainError("j_series: top must be positive");
    // j = E4^3 / Delta with Delta = q * P^24, P = prod (1 - q^n)
    const std::size_t terms = static_cast<std::size_t>(top + 1);
    auto P = euler_product_coefficients(terms);
    // F = P^(-24) via n F_n = sum_{i>=1} (k i - n + i) P_i F_{n-i}, k = -24
    std::vector<mpz_class> F(terms, 0);
    F[0] = 1;
    for (std::size_t n = 1; n < terms; ++n) {
        mpz_class s = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            if (P[i] == 0) continue;
            long w = -24 * static_cast<long>(i) - static_cast<long>(n) + static_cast<long>(i);
            s += P[i] * F[n - i] * w;
        }
        F[n] = s / static_cast<long>(n);
    }
    auto E = e4_coefficients(terms);
    Laurent e4;
    e4.low = 0;
    e4.top = static_cast<long>(terms);
    e4.c = E;
    Laurent inv;
    inv.low = -1;
    inv.top = static_cast<long>(terms) - 1;
    inv.c = F;
    inv.c.resize(terms);
    Laurent j = laurent_mul(laurent_mul(laurent_mul(e4, e4), e4), inv);
    j.set_top(top);
    return j;
}

}  // namespace fibcurve
