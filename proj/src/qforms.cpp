#include "fibcurve/qforms.hpp"

#include "fibcurve/modarith.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace fibcurve {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw ResourceError("quadratic form coefficient overflow");
    return static_cast<std::int64_t>(v);
}

// u*a + v*b = g
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
    std::int64_t u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        std::int64_t q = floor_div(a, b);
        std::int64_t r = a - q * b;
        a = b;
        b = r;
        std::int64_t t = u0 - q * u1;
        u0 = u1;
        u1 = t;
        t = v0 - q * v1;
        v0 = v1;
        v1 = t;
    }
    if (a < 0) {
        a = -a;
        u0 = -u0;
        v0 = -v0;
    }
    u = u0;
    v = v0;
    return a;
}

std::int64_t pmod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

bool squarefree(std::int64_t n) {
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

std::vector<std::int64_t> small_prime_factors(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

std::int64_t QuadForm::disc() const { return narrow(static_cast<i128>(b) * b - static_cast<i128>(4) * a * c); }

std::string to_string(const QuadForm& f) {
    return "(" + std::to_string(f.a) + "," + std::to_string(f.b) + "," + std::to_string(f.c) + ")";
}

bool is_reduced(const QuadForm& f) {
    if (!(std::llabs(f.b) <= f.a && f.a <= f.c)) return false;
    if ((std::llabs(f.b) == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

bool is_primitive(const QuadForm& f) { return std::gcd(std::gcd(f.a, f.b), f.c) == 1; }

QuadForm reduce(QuadForm f) {
    if (f.a <= 0 || f.disc() >= 0) throw DomainError("reduce: form " + to_string(f) + " is not positive definite");
    for (;;) {
        if (f.b <= -f.a || f.b > f.a) {
            std::int64_t r = floor_div(f.a - f.b, 2 * f.a);
            i128 c = static_cast<i128>(f.c) + static_cast<i128>(r) * f.b + static_cast<i128>(r) * r * f.a;
            f.b = narrow(static_cast<i128>(f.b) + static_cast<i128>(2) * r * f.a);
            f.c = narrow(c);
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        if (f.a == f.c && f.b < 0) f.b = -f.b;
        return f;
    }
}

QuadForm principal_form(std::int64_t D) {
    if (!is_discriminant(D)) throw DomainError("not a negative discriminant: " + std::to_string(D));
    std::int64_t b = (D % 2 == 0) ? 0 : 1;
    return QuadForm{1, b, (b - D) / 4};
}

QuadForm inverse(const QuadForm& f) { return reduce(QuadForm{f.a, -f.b, f.c}); }

QuadForm compose(const QuadForm& f1, const QuadForm& f2) {
    const std::int64_t D = f1.disc();
    if (D != f2.disc()) throw DomainError("compose: discriminants differ");
    QuadForm x = f1, y = f2;
    if (x.a > y.a) std::swap(x, y);
    const std::int64_t a1 = x.a, b1 = x.b, a2 = y.a, b2 = y.b, c2 = y.c;
    const std::int64_t s = (b1 + b2) / 2;
    const std::int64_t n = b2 - s;
    std::int64_t y1, d;
    if (a2 % a1 == 0) {
        y1 = 0;
        d = a1;
    } else {
        std::int64_t u, v;
        d = ext_gcd(a2, a1, u, v);
        y1 = u;
    }
    std::int64_t x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        std::int64_t u, v;
        d1 = ext_gcd(s, d, u, v);
        x2 = u;
        y2 = -v;
    }
    const std::int64_t v1 = a1 / d1, v2 = a2 / d1;
    i128 r128 = (static_cast<i128>(y1) * y2 % v1) * n % v1 - static_cast<i128>(x2) * c2 % v1;
    std::int64_t r = pmod(narrow(r128 % v1), v1);
    i128 b3 = static_cast<i128>(b2) + static_cast<i128>(2) * v2 * r;
    i128 a3 = static_cast<i128>(v1) * v2;
    // shift b3 into (-a3, a3] before forming c3
    QuadForm out;
    out.a = narrow(a3);
    i128 two_a = 2 * a3;
    i128 k = b3 / two_a;
    if (b3 - k * two_a > a3) ++k;
    if (b3 - k * two_a <= -a3) --k;
    i128 nb = b3 - k * two_a;
    out.b = narrow(nb);
    i128 num = nb * nb - static_cast<i128>(D);
    if (num % (4 * a3) != 0) throw InternalError("compose: non-integral third coefficient");
    out.c = narrow(num / (4 * a3));
    return reduce(out);
}

QuadForm power(const QuadForm& f, std::uint64_t k) {
    QuadForm result = principal_form(f.disc());
    QuadForm base = reduce(f);
    while (k) {
        if (k & 1) result = compose(result, base);
        base = compose(base, base);
        k >>= 1;
    }
    return result;
}

std::uint64_t form_order(const QuadForm& f) {
    const QuadForm id = principal_form(f.disc());
    QuadForm g = reduce(f);
    QuadForm acc = g;
    std::uint64_t k = 1;
    while (acc != id) {
        acc = compose(acc, g);
        ++k;
    }
    return k;
}

bool is_discriminant(std::int64_t D) { return D < 0 && (pmod(D, 4) == 0 || pmod(D, 4) == 1); }

bool is_fundamental(std::int64_t D) {
    if (!is_discriminant(D)) return false;
    std::int64_t n = -D;
    if (pmod(D, 4) == 1) return squarefree(n);
    std::int64_t m = n / 4;
    std::int64_t dm = pmod(-m, 4);  // D/4 mod 4
    return (dm == 2 || dm == 3) && squarefree(m);
}

Discriminant classify_discriminant(std::int64_t D) {
    if (!is_discriminant(D)) throw DomainError("not a negative discriminant: " + std::to_string(D));
    Discriminant out;
    out.D = D;
    out.fundamental = is_fundamental(D);
    if (pmod(D, 8) == 5) {
        std::int64_t n = -D;
        auto ps = small_prime_factors(n);
        std::int64_t prod = 1;
        for (auto p : ps) prod *= p;
        out.good = prod == n && (ps.size() == 1 || ps.size() == 2);
    }
    return out;
}

std::vector<QuadForm> reduced_forms(std::int64_t D) {
    if (!is_discriminant(D)) throw DomainError("not a negative discriminant: " + std::to_string(D));
    if (-D > kEnumerationBound) throw ResourceError("|D| exceeds the enumeration bound");
    std::vector<QuadForm> out;
    const std::int64_t n = -D;
    for (std::int64_t a = 1; 3 * a * a <= n; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if (pmod(b - D, 2) != 0) continue;
            std::int64_t num = b * b - D;
            if (num % (4 * a) != 0) continue;
            std::int64_t c = num / (4 * a);
            if (c < a) continue;
            if (c == a && b < 0) continue;
            QuadForm f{a, b, c};
            if (is_primitive(f)) out.push_back(f);
        }
    }
    return out;
}

std::uint64_t class_number(std::int64_t D) { return reduced_forms(D).size(); }

std::uint64_t bound_B(double absD) {
    if (absD < 3) throw DomainError("bound_B: |D| must be at least 3");
    long double x = absD;
    long double lx = std::log(x);
    long double first = 6.0L * lx * lx;
    long double L = std::exp(std::sqrt(lx * std::log(lx)));
    long double second = std::pow(L, 1.0L / std::sqrt(8.0L));
    return static_cast<std::uint64_t>(std::ceil(std::max(first, second)));
}

std::vector<PrimeForm> prime_forms(std::int64_t D, std::uint64_t bound) {
    if (D >= 0) throw DomainError("prime_forms: D must be negative");
    std::vector<PrimeForm> out;
    for (auto ell32 : primes_up_to(static_cast<std::uint32_t>(bound))) {
        std::int64_t ell = ell32;
        if (ell == 2) continue;
        mpz_class Dm(static_cast<long>(D));
        if (jacobi(Dm, mpz_class(static_cast<long>(ell))) != 1) continue;
        std::int64_t r = value_or_throw(sqrt_mod(mod(Dm, ell), ell)).get_si();
        std::int64_t b = 0;
        bool found = false;
        for (std::int64_t cand : {r, ell - r, r + ell, 2 * ell - r}) {
            if (pmod(static_cast<std::int64_t>(static_cast<i128>(cand) * cand % (4 * ell)) - pmod(D, 4 * ell), 4 * ell) == 0) {
                if (!found || cand < b) b = cand;
                found = true;
            }
        }
        if (!found) throw InternalError("prime_forms: no b adjustment works");
        std::int64_t c = narrow((static_cast<i128>(b) * b - D) / (4 * ell));
        out.push_back(PrimeForm{QuadForm{ell, b, c}, b});
    }
    return out;
}

double ggz_lower_bound(std::int64_t D) {
    if (!is_fundamental(D)) throw DomainError("ggz_lower_bound: D must be fundamental");
    std::int64_t n = -D;
    double K = (std::gcd(n, static_cast<std::int64_t>(5077)) == 1) ? 55.0 : 7000.0;
    auto ps = small_prime_factors(n);
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        double p = static_cast<double>(ps[i]);
        prod *= 1.0 - 2.0 * std::sqrt(p) / (p + 1.0);
    }
    return std::log(static_cast<double>(n)) * prod / K;
}

std::uint64_t genus_order2_census(std::int64_t D) {
    std::uint64_t count = 0;
    for (const auto& f : reduced_forms(D)) {
        if (f.a == 1) continue;
        if (f.b == 0 || f.b == f.a || f.a == f.c) ++count;
    }
    return count;
}

std::uint64_t two_sylow_order(std::int64_t D) {
    auto forms = reduced_forms(D);
    std::uint64_t h = forms.size();
    unsigned v = 0;
    while (h % 2 == 0) {
        h /= 2;
        ++v;
    }
    const QuadForm id = principal_form(D);
    std::uint64_t count = 0;
    for (const auto& f : forms) {
        QuadForm g = f;
        for (unsigned i = 0; i < v; ++i) g = compose(g, g);
        if (g == id) ++count;
    }
    return count;
}

std::uint64_t subgroup_order(std::int64_t D, const std::vector<QuadForm>& gens) {
    std::set<QuadForm> seen{principal_form(D)};
    std::vector<QuadForm> frontier{principal_form(D)};
    std::vector<QuadForm> g;
    for (const auto& f : gens) g.push_back(reduce(f));
    while (!frontier.empty()) {
        std::vector<QuadForm> next;
        for (const auto& x : frontier) {
            for (const auto& y : g) {
                QuadForm z = compose(x, y);
                if (seen.insert(z).second) next.push_back(z);
            }
        }
        frontier = std::move(next);
    }
    return seen.size();
}

std::string to_string(ShanksVerdict v) {
    switch (v) {
        case ShanksVerdict::ProbablePrime: return "probable prime";
        case ShanksVerdict::LikelyComposite: return "likely composite";
        case ShanksVerdict::Composite: return "composite";
    }
    return "?";
}

ShanksReport shanks_diagnostic(const FibContext& ctx, std::uint64_t h) {
    if (ctx.f_q > mpz_class("1000000000000000")) throw ResourceError("shanks_diagnostic: f_q too large");
    if (h == 0) throw DomainError("shanks_diagnostic: h must be positive");
    const std::int64_t N = ctx.f_q.get_si();
    ShanksReport rep;
    rep.D = -4 * N;
    rep.h = h;
    rep.odd_part = h;
    while (rep.odd_part % 2 == 0) rep.odd_part /= 2;
    rep.bound = bound_B(static_cast<double>(-rep.D));

    auto forms = prime_forms(rep.D, rep.bound);
    rep.prime_form_count = forms.size();
    std::uint64_t odd_primes = 0;
    for (auto p : primes_up_to(static_cast<std::uint32_t>(rep.bound)))
        if (p != 2) ++odd_primes;
    rep.expected_prime_forms = odd_primes / 2.0;

    for (std::int64_t z = 2;; ++z) {
        ++rep.nonresidue_trials;
        if (jacobi(mpz_class(static_cast<long>(z)), ctx.f_q) == -1) break;
        if (rep.nonresidue_trials >= 50) break;
    }

    const QuadForm id = principal_form(rep.D);
    std::set<QuadForm> order2;
    for (const auto& pf : forms) {
        QuadForm g = power(pf.form, rep.odd_part);
        if (g == id) continue;
        std::uint64_t guard = 0;
        for (QuadForm sq = compose(g, g); sq != id; sq = compose(g, g)) {
            g = sq;
            if (++guard > 64) break;  // h was wrong: no 2-power order
        }
        if (compose(g, g) == id) order2.insert(g);
    }
    rep.order2.assign(order2.begin(), order2.end());

    std::set<std::int64_t> factors;
    for (const auto& f : rep.order2) {
        std::int64_t cand = 0;
        if (f.b == 0) cand = f.a;
        else if (f.a == f.b) cand = f.a / 2;
        else if (f.a == f.c) cand = f.a - f.b / 2;
        cand = std::llabs(cand);
        if (cand > 1 && cand < N && N % cand == 0) factors.insert(cand);
    }
    rep.factors.assign(factors.begin(), factors.end());

    if (rep.nonresidue_trials >= 50) {
        rep.verdict = ShanksVerdict::LikelyComposite;
        rep.notes.push_back("no non-residue within 50 trials");
    }
    if (!rep.factors.empty()) {
        rep.verdict = ShanksVerdict::Composite;
        rep.notes.push_back("order-2 class gives a nontrivial factor");
    }
    if (rep.order2.size() >= 2) {
        bool definite = ctx.q % 12 == 5 || ctx.q % 12 == 7;
        if (definite) rep.verdict = ShanksVerdict::Composite;
        else if (rep.verdict == ShanksVerdict::ProbablePrime) rep.verdict = ShanksVerdict::LikelyComposite;
        rep.notes.push_back("several distinct classes of order 2");
    }
    double ratio = rep.expected_prime_forms > 0 ? rep.prime_form_count / rep.expected_prime_forms : 0;
    if (ratio < 0.5 || ratio > 2.0) {
        if (rep.verdict == ShanksVerdict::ProbablePrime) rep.verdict = ShanksVerdict::LikelyComposite;
        rep.notes.push_back("prime form count far from half the odd primes below B");
    }
    return rep;
}

}  // namespace fibcurve
