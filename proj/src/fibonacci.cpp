#include "fibcurve/fibonacci.hpp"

#include "fibcurve/modarith.hpp"

namespace fibcurve {

namespace {

// fast doubling: (f_k, f_{k+1}) -> (f_2k, f_2k+1)
template <class Reduce>
std::pair<mpz_class, mpz_class> doubling(const mpz_class& n, Reduce reduce) {
    mpz_class a = 0, b = 1;
    for (long i = static_cast<long>(bit_length(n)) - 1; i >= 0; --i) {
        mpz_class c = reduce(a * (2 * b - a));
        mpz_class d = reduce(a * a + b * b);
        if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
            a = d;
            b = reduce(c + d);
        } else {
            a = c;
            b = d;
        }
    }
    return {a, b};
}

}  // namespace

mpz_class fib(unsigned long n) {
    return doubling(mpz_class(n), [](const mpz_class& x) { return x; }).first;
}

std::pair<mpz_class, mpz_class> fib_pair_mod(const mpz_class& n, const mpz_class& m) {
    if (m < 2) throw DomainError("fib_pair_mod: modulus must be at least 2");
    if (n < 0) throw DomainError("fib_pair_mod: negative index");
    return doubling(n, [&](const mpz_class& x) { return mod(x, m); });
}

std::uint64_t pisano_period(std::uint64_t m) {
    if (m < 2) throw DomainError("pisano_period: modulus must be at least 2");
    std::uint64_t a = 0, b = 1, k = 0;
    do {
        std::uint64_t c = (a + b) % m;
        a = b;
        b = c;
        ++k;
    } while (!(a == 0 && b == 1));
    return k;
}

FibContext::FibContext(unsigned long index) : q(index), f_q(fib(index)) {
    if (index < 3) throw DomainError("FibContext: index must be at least 3");
    m = f_q - 1;
    e = mpz_scan1(m.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), e);
}

bool is_pipeline_index(unsigned long q) { return q > 3 && is_prime_u64(q); }

int legendre_fib(std::uint64_t ell, const FibContext& ctx) {
    if (ell < 3 || ell % 2 == 0) throw DomainError("legendre_fib: ell must be an odd prime");
    if (mpz_class(static_cast<unsigned long>(ell)) == ctx.f_q)
        throw DomainError("legendre_fib: ell equals f_q");
    std::uint64_t period = pisano_period(ell);
    std::uint64_t r = ctx.q % period;
    auto [fr, unused] = fib_pair_mod(mpz_class(static_cast<unsigned long>(r)),
                                     mpz_class(static_cast<unsigned long>(ell)));
    (void)unused;
    return jacobi(fr, mpz_class(static_cast<unsigned long>(ell)));
}

OrComposite<mpz_class> cassini_sqrt_minus_one(const FibContext& ctx) {
    if (ctx.q % 2 == 0 || ctx.q < 5) throw DomainError("cassini_sqrt_minus_one: q must be odd and > 3");
    const mpz_class& N = ctx.f_q;
    mpz_class num = fib((ctx.q + 1) / 2) % N;
    mpz_class den = fib((ctx.q - 1) / 2) % N;
    auto inv = invmod(den, N);
    if (!inv) {
        mpz_class g = gcd(den, N);
        return CompositeSignal{g, "f_{(q-1)/2} is not invertible modulo f_q"};
    }
    mpz_class s = mod(num * *inv, N);
    mpz_class t = mod(s * s + 1, N);
    if (t != 0) {
        mpz_class g = gcd(t, N);
        if (g == N) g = 0;
        return CompositeSignal{g, "Cassini ratio does not square to -1 modulo f_q"};
    }
    return s;
}

bool binet_check_mod(unsigned long n, const mpz_class& p) {
    if (p < 3 || p == 5 || jacobi(mpz_class(5), p) != 1)
        throw DomainError("binet_check_mod: 5 must be a quadratic residue mod p");
    mpz_class r5 = value_or_throw(sqrt_mod(mpz_class(5), p));
    mpz_class half = *invmod(mpz_class(2), p);
    mpz_class alpha = mod((1 + r5) * half, p);
    mpz_class beta = mod((1 - r5) * half, p);
    mpz_class nn(n);
    mpz_class lhs = mod((powmod(alpha, nn, p) - powmod(beta, nn, p)) * *invmod(r5, p), p);
    return lhs == mod(fib(n), p);
}

}  // namespace fibcurve
