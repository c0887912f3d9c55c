#include "fibcurve/modarith.hpp"

#include <algorithm>
#include <set>

namespace fibcurve {

int jacobi(const mpz_class& a, const mpz_class& n) {
    if (n <= 0 || mpz_even_p(n.get_mpz_t())) throw DomainError("jacobi: modulus must be odd and positive");
    return mpz_jacobi(mod(a, n).get_mpz_t(), n.get_mpz_t());
}

int kronecker(const mpz_class& a, const mpz_class& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

mpz_class canonical_root(const mpz_class& x, const mpz_class& p) {
    mpz_class r = mod(x, p);
    mpz_class s = p - r;
    return (r == 0 || r <= s) ? r : s;
}

namespace {

void require_residue(const mpz_class& a, const mpz_class& p) {
    if (jacobi(a, p) == -1) throw NotASquare("not a quadratic residue modulo " + dec(p));
}

}  // namespace

mpz_class sqrt_mod_3mod4(const mpz_class& a, const mpz_class& p) {
    if (mod(p, 4) != 3) throw DomainError("sqrt_mod_3mod4: p must be 3 mod 4");
    require_residue(a, p);
    return canonical_root(powmod(mod(a, p), (p + 1) / 4, p), p);
}

mpz_class sqrt_mod_5mod8(const mpz_class& a, const mpz_class& p) {
    if (mod(p, 8) != 5) throw DomainError("sqrt_mod_5mod8: p must be 5 mod 8");
    require_residue(a, p);
    mpz_class aa = mod(a, p);
    mpz_class x;
    if (powmod(aa, (p - 1) / 4, p) == 1) {
        x = powmod(aa, (p + 3) / 8, p);
    } else {
        x = mod(2 * aa * powmod(4 * aa, (p - 5) / 8, p), p);
    }
    return canonical_root(x, p);
}

OrComposite<SqrtTable> ts_precompute(const mpz_class& p, const mpz_class& n) {
    if (p < 3 || mpz_even_p(p.get_mpz_t())) throw DomainError("ts_precompute: p must be odd");
    if (jacobi(n, p) != -1) throw DomainError("ts_precompute: n must be a non-residue");
    SqrtTable t;
    t.p = p;
    t.n = mod(n, p);
    t.m = p - 1;
    t.e = mpz_scan1(t.m.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(t.m.get_mpz_t(), t.m.get_mpz_t(), t.e);
    t.g = powmod(t.n, t.m, p);

    mpz_class half = t.g;
    for (unsigned long i = 1; i < t.e; ++i) half = half * half % p;
    if (half != p - 1) {
        mpz_class f = gcd(half - 1, p);
        if (f == p || f == 1) f = gcd(half + 1, p);
        if (f == p) f = 0;
        return CompositeSignal{f == 1 ? mpz_class(0) : f, "g^(2^(e-1)) is not -1"};
    }

    if (t.e <= SqrtTable::kMaxTableExponent) {
        t.materialized = true;
        unsigned long size = 1UL << t.e;
        t.powers.reserve(size);
        mpz_class cur = 1, root = 1;
        for (unsigned long i = 0; i < size; ++i) {
            t.powers.push_back(cur);
            if (i % 2 == 0) {
                t.roots.emplace(cur, root);
                root = root * t.g % p;
            }
            cur = cur * t.g % p;
        }
        if (cur != 1) return CompositeSignal{0, "2-Sylow generator has wrong order"};
    }
    return t;
}

OrComposite<mpz_class> ts_sqrt(const mpz_class& a, const SqrtTable& t) {
    const mpz_class& p = t.p;
    mpz_class aa = mod(a, p);
    if (aa == 0) return mpz_class(0);
    mpz_class x = powmod(aa, (t.m + 1) / 2, p);
    mpz_class y = powmod(aa, t.m, p);
    if (t.materialized) {
        auto it = t.roots.find(y);
        if (it == t.roots.end()) return CompositeSignal{0, "a^m is not an even power of g"};
        auto zinv = invmod(it->second, p);
        if (!zinv) return CompositeSignal{gcd(it->second, p), "table root not invertible"};
        mpz_class r = mod(x * *zinv, p);
        if (mod(r * r - aa, p) != 0) return CompositeSignal{0, "square root check failed"};
        return canonical_root(r, p);
    }
    // classic Tonelli-Shanks with the stored generator
    mpz_class z = t.g;
    unsigned long r = t.e;
    while (y != 1) {
        unsigned long i = 0;
        mpz_class yy = y;
        while (yy != 1 && i < r) {
            yy = yy * yy % p;
            ++i;
        }
        if (i == r) return CompositeSignal{0, "Tonelli-Shanks loop did not reach 1"};
        mpz_class s = z;
        for (unsigned long k = 0; k + i + 1 < r; ++k) s = s * s % p;
        x = x * s % p;
        z = s * s % p;
        y = y * z % p;
        r = i;
    }
    if (mod(x * x - aa, p) != 0) return CompositeSignal{0, "square root check failed"};
    return canonical_root(x, p);
}

mpz_class smallest_nonresidue(const mpz_class& p) {
    for (unsigned long q = 2;; ++q) {
        if (!is_prime_u64(q)) continue;
        if (mpz_class(q) >= p) throw DomainError("no prime non-residue below p");
        int j = jacobi(mpz_class(q), p);
        if (j == -1) return mpz_class(q);
        if (j == 0) throw CompositeDetected(CompositeSignal{mpz_class(q), "small prime divides modulus"});
    }
}

OrComposite<mpz_class> sqrt_mod(const mpz_class& a, const mpz_class& p, const SqrtTable* table) {
    if (p < 3 || mpz_even_p(p.get_mpz_t())) throw DomainError("sqrt_mod: p must be odd");
    mpz_class aa = mod(a, p);
    if (aa == 0) return mpz_class(0);
    int j = jacobi(aa, p);
    if (j == 0) return CompositeSignal{gcd(aa, p), "residue shares a factor with the modulus"};
    if (j == -1) throw NotASquare("not a quadratic residue modulo " + dec(p));
    unsigned long r8 = mpz_fdiv_ui(p.get_mpz_t(), 8);
    mpz_class x;
    if (r8 % 4 == 3) {
        x = sqrt_mod_3mod4(aa, p);
    } else if (r8 == 5) {
        x = sqrt_mod_5mod8(aa, p);
    } else {
        if (table && table->p == p) return ts_sqrt(aa, *table);
        mpz_class n;
        try {
            n = smallest_nonresidue(p);
        } catch (const CompositeDetected& c) {
            return c.signal;
        }
        auto t = ts_precompute(p, n);
        if (is_composite(t)) return std::get<CompositeSignal>(t);
        return ts_sqrt(aa, std::get<SqrtTable>(t));
    }
    if (mod(x * x - aa, p) != 0) return CompositeSignal{0, "square root check failed"};
    return x;
}

namespace {

// roots of x^2 = a mod p^k
std::vector<mpz_class> sqrt_prime_power(const mpz_class& a, const mpz_class& p, unsigned k) {
    mpz_class pk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), k);
    std::vector<mpz_class> cur;
    mpz_class a1 = mod(a, p);
    if (p == 2) {
        cur = {a1};  // x^2 = x mod 2
    } else if (a1 == 0) {
        cur = {0};
    } else {
        if (jacobi(a1, p) != 1) return {};
        mpz_class r = value_or_throw(sqrt_mod(a1, p));
        cur = {r};
        if (r != 0 && p - r != r) cur.push_back(p - r);
    }
    mpz_class pi = p;
    for (unsigned i = 1; i < k; ++i) {
        mpz_class next_mod = pi * p;
        std::set<mpz_class> next;
        bool hensel = p != 2 && mod(a, p) != 0;
        for (const auto& r : cur) {
            if (hensel) {
                mpz_class inv = *invmod(mod(2 * r, next_mod), next_mod);
                mpz_class s = mod(r - (r * r - a) * inv, next_mod);
                next.insert(s);
                continue;
            }
            for (mpz_class j = 0; j < p; ++j) {
                mpz_class c = r + j * pi;
                if (mod(c * c - a, next_mod) == 0) next.insert(c);
            }
        }
        cur.assign(next.begin(), next.end());
        pi = next_mod;
        if (cur.empty()) return {};
        if (cur.size() > 100000) throw ResourceError("too many square roots");
    }
    std::vector<mpz_class> out;
    for (auto& r : cur)
        if (mod(r * r - a, pk) == 0) out.push_back(mod(r, pk));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::optional<std::vector<mpz_class>> sqrt_mod_all(const mpz_class& a, const mpz_class& m) {
    if (m < 1) throw DomainError("sqrt_mod_all: modulus must be positive");
    if (m == 1) return std::vector<mpz_class>{0};
    mpz_class rest;
    auto primes = prime_divisors(m, 1000000, &rest);
    if (rest > 1) {
        if (mpz_probab_prime_p(rest.get_mpz_t(), 30) == 0) return std::nullopt;
        primes.push_back(rest);
    }
    std::vector<mpz_class> roots{0};
    mpz_class modulus = 1;
    for (const auto& p : primes) {
        unsigned k = 0;
        mpz_class t = m;
        while (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) {
            t /= p;
            ++k;
        }
        mpz_class pk;
        mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), k);
        std::vector<mpz_class> local;
        try {
            local = sqrt_prime_power(a, p, k);
        } catch (const CompositeDetected&) {
            return std::nullopt;
        }
        if (local.empty()) return std::vector<mpz_class>{};
        std::vector<mpz_class> combined;
        mpz_class inv = *invmod(modulus, pk);
        for (const auto& r : roots)
            for (const auto& s : local) combined.push_back(r + modulus * mod((s - r) * inv, pk));
        modulus *= pk;
        roots = std::move(combined);
        if (roots.size() > 100000) throw ResourceError("too many square roots");
    }
    for (auto& r : roots) r = mod(r, m);
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::optional<Solution> cornacchia_descent(const mpz_class& d, const mpz_class& m, const mpz_class& r0) {
    mpz_class a = m, b = mod(r0, m);
    if (2 * b > m) b = m - b;
    while (b * b >= m) {
        mpz_class t = a % b;
        a = b;
        b = t;
    }
    mpz_class rem = m - b * b;
    if (rem <= 0 || !mpz_divisible_p(rem.get_mpz_t(), d.get_mpz_t())) return std::nullopt;
    mpz_class y;
    if (!is_square(rem / d, &y) || y == 0) return std::nullopt;
    return Solution{b, y};
}

std::optional<Solution> cornacchia(const mpz_class& d, const mpz_class& m) {
    if (d < 1 || m <= d) throw DomainError("cornacchia: need 1 <= d < m");
    auto roots = sqrt_mod_all(-d, m);
    if (!roots || roots->empty()) return std::nullopt;
    std::set<mpz_class> starts;
    for (const auto& r : *roots) starts.insert(2 * r > m ? m - r : r);
    std::optional<Solution> best;
    for (const auto& r0 : starts) {
        auto s = cornacchia_descent(d, m, r0);
        if (!s || gcd(s->first, s->second) != 1) continue;
        if (!best || s->first > best->first) best = s;
    }
    return best;
}

std::optional<Solution> cornacchia_4n(const mpz_class& D, const mpz_class& N, const mpz_class& sqrt_D) {
    if (D >= 0) throw DomainError("cornacchia_4n: D must be negative");
    mpz_class r = mod(D, 4);
    if (r != 0 && r != 1) throw DomainError("cornacchia_4n: D must be 0 or 1 mod 4");
    mpz_class absD = -D;
    mpz_class fourN = 4 * N;
    if (fourN < absD) return std::nullopt;
    mpz_class b = mod(sqrt_D, N);
    if (mod(b * b - D, N) != 0) throw DomainError("cornacchia_4n: supplied value is not a square root of D");
    if (mpz_odd_p(b.get_mpz_t()) != mpz_odd_p(D.get_mpz_t())) b = N - b;
    mpz_class a = 2 * N;
    mpz_class limit = isqrt(fourN);
    while (b > limit) {
        mpz_class t = a % b;
        a = b;
        b = t;
    }
    mpz_class rem = fourN - b * b;
    if (rem <= 0 || !mpz_divisible_p(rem.get_mpz_t(), absD.get_mpz_t())) return std::nullopt;
    mpz_class y;
    if (!is_square(rem / absD, &y) || y == 0) return std::nullopt;
    return Solution{b, y};
}

}  // namespace fibcurve
