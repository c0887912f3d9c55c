#pragma once

#include "fibcurve/numeric.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fibcurve {

// Y^2 = X^3 + aX + b over Z/pZ; p need not be prime.
struct Curve {
    mpz_class p, a, b;
    bool operator==(const Curve& o) const { return p == o.p && a == o.a && b == o.b; }
};

struct Point {
    bool inf = true;
    mpz_class x, y;

    static Point infinity() { return Point{}; }
    static Point affine(const mpz_class& x, const mpz_class& y) { return Point{false, x, y}; }
    bool operator==(const Point& o) const { return inf == o.inf && (inf || (x == o.x && y == o.y)); }
};

// An inverse did not exist modulo p; 1 < gcd(witness, p) < p.
struct AddFailure {
    mpz_class witness;
    mpz_class factor;
};

using PointResult = std::variant<Point, AddFailure>;

inline bool failed(const PointResult& r) { return std::holds_alternative<AddFailure>(r); }
inline const Point& point_of(const PointResult& r) { return std::get<Point>(r); }

std::string to_string(const Curve& E);
std::string to_string(const Point& P);

// Throws DomainError when 4a^3 + 27b^2 = 0 mod p, CompositeDetected when it
// shares a proper factor with p.
Curve make_curve(const mpz_class& p, const mpz_class& a, const mpz_class& b);

mpz_class curve_discriminant(const Curve& E);  // -16(4a^3 + 27b^2) mod p
OrComposite<mpz_class> j_invariant(const Curve& E);

// Y^2 = X^3 + aX - a with a = 27r / (4(1728 - r)); (0, 1) for r = 0, (1, 0) for r = 1728.
OrComposite<Curve> curve_from_j(const mpz_class& r, const mpz_class& p);

bool on_curve(const Point& P, const Curve& E);
Point negate(const Point& P, const Curve& E);
PointResult add(const Point& P, const Point& Q, const Curve& E);
PointResult dbl(const Point& P, const Curve& E);
PointResult scalar_mul(const mpz_class& k, const Point& P, const Curve& E);

// Random affine point; p is expected prime, a failed square root reports the modulus as composite.
OrComposite<Point> random_point(const Curve& E, gmp_randclass& rng);

// Y^2 = X^3 + g^2 a X + g^3 b; g must be a non-residue.
Curve quadratic_twist(const Curve& E, const mpz_class& g);
Curve canonical_twist(const Curve& E);  // smallest prime non-residue

struct TwistFamily {
    std::vector<Curve> curves;  // one per class of F_p^* / (F_p^*)^d
    bool supersingular = false;
};

// Twists of a curve with j = 0 (a = 0) or j = 1728 (b = 0).
TwistFamily higher_twists(const Curve& E);

std::uint64_t order_exhaustive(const Curve& E);  // p <= 10^7
mpz_class order_bsgs(const Curve& E, std::uint64_t seed = 0);  // p <= 10^13

// Order of P given a positive multiple M of it, factoring M by trial division.
mpz_class point_order(const Point& P, const mpz_class& M, const Curve& E);

}  // namespace fibcurve
