#include "fibcurve/numeric.hpp"

#include <algorithm>

namespace fibcurve {

mpz_class mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& m) {
    if (exp < 0) {
        auto inv = invmod(base, m);
        if (!inv) throw DomainError("powmod: base not invertible for negative exponent");
        return powmod(*inv, -exp, m);
    }
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

std::optional<mpz_class> invmod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
    return r;
}

mpz_class isqrt(const mpz_class& n) {
    if (n < 0) throw DomainError("isqrt of negative number");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(const mpz_class& n, mpz_class* root) {
    if (n < 0) return false;
    mpz_class r = isqrt(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

mpz_class icbrt(const mpz_class& n) {
    if (n < 0) throw DomainError("icbrt of negative number");
    mpz_class r;
    mpz_root(r.get_mpz_t(), n.get_mpz_t(), 3);
    return r;
}

bool is_cube(const mpz_class& n) {
    mpz_class a = abs(n);
    mpz_class r = icbrt(a);
    return r * r * r == a;
}

unsigned long bit_length(const mpz_class& n) {
    if (n == 0) return 0;
    return mpz_sizeinbase(n.get_mpz_t(), 2);
}

std::string dec(const mpz_class& n) { return n.get_str(10); }

mpz_class parse_integer(const std::string& s) {
    mpz_class r;
    std::string t = s;
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    if (t.empty() || r.set_str(t, 10) != 0) throw DomainError("not an integer: '" + s + "'");
    return r;
}

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t n) {
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

bool is_prime_trial(const mpz_class& n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (mpz_even_p(n.get_mpz_t())) return false;
    mpz_class r = isqrt(n);
    for (mpz_class d = 3; d <= r; d += 2)
        if (mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t())) return false;
    return true;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool ok = false;
        for (int i = 1; i < s; ++i) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

std::vector<mpz_class> prime_divisors(const mpz_class& n, std::uint64_t limit, mpz_class* rest) {
    std::vector<mpz_class> out;
    mpz_class m = abs(n);
    bool exhausted = true;
    for (std::uint64_t d = 2;; d += (d == 2 ? 1 : 2)) {
        if (d > limit) {
            exhausted = false;
            break;
        }
        mpz_class dd(static_cast<unsigned long>(d));
        if (dd * dd > m) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), d)) {
            out.push_back(dd);
            while (mpz_divisible_ui_p(m.get_mpz_t(), d)) m /= dd;
        }
    }
    mpz_class leftover = 1;
    if (m > 1) {
        if (exhausted) out.push_back(m);
        else leftover = m;
    }
    if (rest) *rest = leftover;
    return out;
}

}  // namespace fibcurve
