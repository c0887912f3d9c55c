#include "fibcurve/curve.hpp"

#include "fibcurve/modarith.hpp"

#include <map>
#include <numeric>

namespace fibcurve {

namespace {

constexpr std::uint64_t kExhaustiveLimit = 10'000'000;
const mpz_class kBsgsLimit("10000000000000");

std::optional<AddFailure> try_inverse(const mpz_class& v, const mpz_class& p, mpz_class& out) {
    mpz_class g = gcd(v, p);
    if (g != 1) return AddFailure{v, g};
    out = *invmod(v, p);
    return std::nullopt;
}

mpz_class primitive_root(const mpz_class& p) {
    mpz_class rest;
    auto fs = prime_divisors(p - 1, 1'000'000, &rest);
    if (rest > 1) fs.push_back(rest);
    for (mpz_class g = 2;; ++g) {
        bool ok = true;
        for (const auto& r : fs)
            if (powmod(g, (p - 1) / r, p) == 1) ok = false;
        if (ok) return g;
    }
}

}  // namespace

std::string to_string(const Curve& E) {
    return "Y^2 = X^3 + " + E.a.get_str() + "X + " + E.b.get_str() + " mod " + E.p.get_str();
}

std::string to_string(const Point& P) {
    return P.inf ? std::string("O") : "(" + P.x.get_str() + ", " + P.y.get_str() + ")";
}

mpz_class curve_discriminant(const Curve& E) {
    return mod(-16 * (4 * E.a * E.a * E.a + 27 * E.b * E.b), E.p);
}

Curve make_curve(const mpz_class& p, const mpz_class& a, const mpz_class& b) {
    if (p <= 3) throw DomainError("make_curve: modulus must exceed 3");
    Curve E{p, mod(a, p), mod(b, p)};
    mpz_class d = mod(4 * E.a * E.a * E.a + 27 * E.b * E.b, p);
    if (d == 0) throw DomainError("make_curve: singular curve");
    mpz_class g = gcd(d, p);
    if (g != 1) throw CompositeDetected({g, "curve discriminant shares a factor with the modulus"});
    return E;
}

OrComposite<mpz_class> j_invariant(const Curve& E) {
    mpz_class a3 = 4 * E.a * E.a * E.a;
    mpz_class den = mod(a3 + 27 * E.b * E.b, E.p);
    mpz_class inv;
    if (auto f = try_inverse(den, E.p, inv)) return CompositeSignal{f->factor, "j-invariant denominator"};
    return mod(1728 * a3 * inv, E.p);
}

OrComposite<Curve> curve_from_j(const mpz_class& r0, const mpz_class& p) {
    mpz_class r = mod(r0, p);
    if (r == 0) return make_curve(p, 0, 1);
    if (r == mod(mpz_class(1728), p)) return make_curve(p, 1, 0);
    mpz_class den = mod(4 * (1728 - r), p), inv;
    if (auto f = try_inverse(den, p, inv)) return CompositeSignal{f->factor, "curve_from_j denominator"};
    mpz_class a = mod(27 * r * inv, p);
    try {
        return make_curve(p, a, -a);
    } catch (const CompositeDetected& e) {
        return e.signal;
    }
}

bool on_curve(const Point& P, const Curve& E) {
    if (P.inf) return true;
    return mod(P.y * P.y - (P.x * P.x * P.x + E.a * P.x + E.b), E.p) == 0;
}

Point negate(const Point& P, const Curve& E) {
    if (P.inf) return P;
    return Point::affine(P.x, mod(-P.y, E.p));
}

PointResult dbl(const Point& P, const Curve& E) {
    if (P.inf) return P;
    mpz_class y2 = mod(2 * P.y, E.p);
    if (y2 == 0) return Point::infinity();
    mpz_class inv;
    if (auto f = try_inverse(y2, E.p, inv)) return *f;
    mpz_class lam = mod((3 * P.x * P.x + E.a) * inv, E.p);
    mpz_class x3 = mod(lam * lam - 2 * P.x, E.p);
    mpz_class y3 = mod(lam * (P.x - x3) - P.y, E.p);
    return Point::affine(x3, y3);
}

PointResult add(const Point& P, const Point& Q, const Curve& E) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    if (mod(P.x - Q.x, E.p) == 0) {
        mpz_class s = mod(P.y + Q.y, E.p);
        if (s == 0) return Point::infinity();
        if (mod(P.y - Q.y, E.p) == 0) return dbl(P, E);
        // x agrees but y is neither equal nor opposite: only possible over a ring
        return AddFailure{s, gcd(s, E.p)};
    }
    mpz_class inv;
    if (auto f = try_inverse(mod(Q.x - P.x, E.p), E.p, inv)) return *f;
    mpz_class lam = mod((Q.y - P.y) * inv, E.p);
    mpz_class x3 = mod(lam * lam - P.x - Q.x, E.p);
    mpz_class y3 = mod(lam * (P.x - x3) - P.y, E.p);
    return Point::affine(x3, y3);
}

PointResult scalar_mul(const mpz_class& k, const Point& P, const Curve& E) {
    if (k < 0) return scalar_mul(-k, negate(P, E), E);
    Point R = Point::infinity();
    for (long i = static_cast<long>(bit_length(k)) - 1; i >= 0; --i) {
        auto d = dbl(R, E);
        if (failed(d)) return d;
        R = point_of(d);
        if (mpz_tstbit(k.get_mpz_t(), i)) {
            auto s = add(R, P, E);
            if (failed(s)) return s;
            R = point_of(s);
        }
    }
    return R;
}

OrComposite<Point> random_point(const Curve& E, gmp_randclass& rng) {
    for (int tries = 0; tries < 200; ++tries) {
        mpz_class x = rng.get_z_range(E.p);
        mpz_class rhs = mod(x * x * x + E.a * x + E.b, E.p);
        if (rhs == 0) return Point::affine(x, 0);
        int s = jacobi(rhs, E.p);
        if (s == 0) return CompositeSignal{gcd(rhs, E.p), "point search hit a shared factor"};
        if (s < 0) continue;
        try {
            auto r = sqrt_mod(rhs, E.p);
            if (is_composite(r)) return std::get<CompositeSignal>(r);
            mpz_class y = std::get<mpz_class>(r);
            if (mod(y * y - rhs, E.p) != 0) return CompositeSignal{0, "square root check failed"};
            return Point::affine(x, y);
        } catch (const NotASquare&) {
            return CompositeSignal{0, "Jacobi symbol +1 on a non-residue"};
        }
    }
    throw ResourceError("random_point: no point found");
}

Curve quadratic_twist(const Curve& E, const mpz_class& g) {
    if (jacobi(g, E.p) != -1) throw DomainError("quadratic_twist: g must be a quadratic non-residue");
    return make_curve(E.p, g * g * E.a, g * g * g * E.b);
}

Curve canonical_twist(const Curve& E) { return quadratic_twist(E, smallest_nonresidue(E.p)); }

TwistFamily higher_twists(const Curve& E) {
    const mpz_class& p = E.p;
    const bool j0 = E.a == 0, j1728 = E.b == 0;
    if (!j0 && !j1728) throw DomainError("higher_twists: j-invariant must be 0 or 1728");
    unsigned long n = j0 ? 6 : 4;
    mpz_class pm1 = p - 1;
    unsigned long d = std::gcd(n, mpz_class(pm1 % n).get_ui());
    if (d == 0) d = n;
    mpz_class g = primitive_root(p);
    TwistFamily fam;
    fam.supersingular = j0 ? (p % 3 == 2) : (p % 4 == 3);
    mpz_class c = 1;
    for (unsigned long i = 0; i < d; ++i, c = mod(c * g, p)) {
        if (j0) fam.curves.push_back(make_curve(p, 0, E.b * c));
        else fam.curves.push_back(make_curve(p, E.a * c, 0));
    }
    return fam;
}

std::uint64_t order_exhaustive(const Curve& E) {
    if (E.p > kExhaustiveLimit) throw ResourceError("order_exhaustive: modulus above 10^7");
    const std::uint64_t p = E.p.get_ui(), a = E.a.get_ui(), b = E.b.get_ui();
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (std::uint64_t y = 1; y <= p / 2; ++y) chi[y * y % p] = 1;
    std::int64_t n = static_cast<std::int64_t>(p) + 1;
    for (std::uint64_t x = 0; x < p; ++x) n += chi[(x * x % p * x + a * x + b) % p];
    return static_cast<std::uint64_t>(n);
}

mpz_class point_order(const Point& P, const mpz_class& M, const Curve& E) {
    mpz_class ord = M;
    mpz_class rest;
    auto fs = prime_divisors(M, 10'000'000, &rest);
    if (rest > 1) fs.push_back(rest);
    for (const auto& r : fs) {
        while (ord % r == 0) {
            auto Q = scalar_mul(ord / r, P, E);
            if (failed(Q) || !point_of(Q).inf) break;
            ord /= r;
        }
    }
    return ord;
}

namespace {

using PointKey = std::pair<mpz_class, mpz_class>;

PointKey key_of(const Point& P) { return P.inf ? PointKey{-1, -1} : PointKey{P.x, P.y}; }

Point must(const PointResult& r) {
    if (failed(r)) throw CompositeDetected({std::get<AddFailure>(r).factor, "point arithmetic failed"});
    return point_of(r);
}

// A positive multiple of ord(P) inside [lo, hi].
mpz_class multiple_in_interval(const Point& P, const mpz_class& lo, const mpz_class& hi, const Curve& E) {
    mpz_class width = hi - lo + 1;
    unsigned long m = mpz_class(isqrt(width) + 1).get_ui();
    std::map<PointKey, unsigned long> baby;
    Point R = Point::infinity();
    for (unsigned long j = 0; j < m; ++j) {
        baby.emplace(key_of(R), j);
        R = must(add(R, P, E));
    }
    Point step = must(scalar_mul(mpz_class(m), P, E));
    Point G = must(scalar_mul(lo, P, E));
    for (unsigned long i = 0; i <= m; ++i) {
        auto it = baby.find(key_of(G));
        if (it != baby.end()) {
            mpz_class M = lo + mpz_class(i) * m - it->second;
            if (M > 0) return M;
        }
        G = must(add(G, step, E));
    }
    throw InternalError("order_bsgs: no multiple of the point order in the Hasse interval");
}

mpz_class lcm_z(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

}  // namespace

mpz_class order_bsgs(const Curve& E, std::uint64_t seed) {
    if (E.p > kBsgsLimit) throw ResourceError("order_bsgs: modulus above 10^13");
    const mpz_class& p = E.p;
    mpz_class s = isqrt(4 * p);
    mpz_class lo = p + 1 - s, hi = p + 1 + s;
    Curve T = canonical_twist(E);
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(static_cast<unsigned long>(seed) * 2654435761UL + 1);
    mpz_class L = 1, Lt = 1;
    for (int round = 0; round < 60; ++round) {
        Point P = value_or_throw(random_point(E, rng));
        L = lcm_z(L, point_order(P, multiple_in_interval(P, lo, hi, E), E));
        if (round >= 2) {
            Point Q = value_or_throw(random_point(T, rng));
            Lt = lcm_z(Lt, point_order(Q, multiple_in_interval(Q, lo, hi, T), T));
        }
        // N = 0 mod L and N = 2p + 2 mod Lt
        mpz_class g = gcd(L, Lt), c = mod(2 * p + 2, Lt);
        if (c % g != 0) throw InternalError("order_bsgs: inconsistent point orders; modulus is not prime?");
        mpz_class mt = Lt / g, k = 0;
        if (mt > 1) k = mod((c / g) * *invmod((L / g) % mt, mt), mt);
        mpz_class step = L * mt, N0 = L * k;
        mpz_class first = lo + mod(N0 - lo, step);
        if (first > hi) throw InternalError("order_bsgs: no admissible order in the Hasse interval");
        if (first + step > hi) return first;
    }
    // Mestre's bound p > 229 no longer applies; small fields are simply counted
    if (E.p <= 1000) return order_exhaustive(E);
    throw ResourceError("order_bsgs: group order still ambiguous");
}

}  // namespace fibcurve
