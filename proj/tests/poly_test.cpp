#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fibcurve/modarith.hpp"
#include "fibcurve/poly.hpp"

using namespace fibcurve;

namespace {

Poly random_poly(const PolyRing& R, int deg, std::mt19937_64& rng) {
    std::vector<mpz_class> c;
    std::uniform_int_distribution<unsigned long> d(0, R.modulus().get_ui() - 1);
    for (int i = 0; i <= deg; ++i) c.push_back(d(rng));
    c.back() = 1;
    return R.make(c);
}

bool has_root_brute(const PolyRing& R, const Poly& f) {
    for (mpz_class v = 0; v < R.modulus(); ++v)
        if (R.eval(f, v) == 0) return true;
    return false;
}

}  // namespace

TEST(Poly, DivisionIdentity) {
    std::mt19937_64 rng(1);
    PolyRing R(mpz_class(1000003));
    for (int t = 0; t < 50; ++t) {
        Poly a = random_poly(R, 5 + t % 9, rng), b = random_poly(R, 1 + t % 5, rng);
        Poly q, r;
        R.divmod(a, b, &q, &r);
        EXPECT_LT(r.deg(), b.deg());
        EXPECT_EQ(R.add(R.mul(q, b), r), a);
    }
}

TEST(Poly, PowmodMatchesRepeatedProduct) {
    std::mt19937_64 rng(2);
    PolyRing R(mpz_class(101));
    Poly m = random_poly(R, 6, rng), b = random_poly(R, 4, rng);
    Poly acc = R.constant(1);
    for (unsigned e = 0; e < 60; ++e) {
        EXPECT_EQ(R.powmod(b, e, m), R.rem(acc, m)) << e;
        acc = R.mulmod(acc, b, m);
    }
}

TEST(Poly, GcdAndInverse) {
    std::mt19937_64 rng(3);
    PolyRing R(mpz_class(7919));
    for (int t = 0; t < 30; ++t) {
        Poly g = random_poly(R, 2, rng);
        Poly a = R.mul(g, random_poly(R, 3, rng)), b = R.mul(g, random_poly(R, 4, rng));
        Poly d = R.gcd(a, b);
        EXPECT_TRUE(R.rem(a, d).is_zero());
        EXPECT_TRUE(R.rem(b, d).is_zero());
        EXPECT_TRUE(R.rem(d, R.monic(g)).is_zero());
        Poly m = random_poly(R, 5, rng), u = random_poly(R, 3, rng);
        auto inv = R.invmod(u, m);
        if (R.gcd(u, m).deg() == 0) {
            ASSERT_TRUE(inv);
            EXPECT_EQ(R.mulmod(u, *inv, m), R.constant(1));
        } else {
            EXPECT_FALSE(inv);
        }
    }
}

TEST(Poly, RootsAgreeWithExhaustiveSearch) {
    std::mt19937_64 rng(4);
    for (unsigned long p : {67UL, 101UL, 193UL, 251UL}) {
        PolyRing R{mpz_class(p)};
        for (int t = 0; t < 40; ++t) {
            Poly f = random_poly(R, 1 + t % 8, rng);
            std::vector<mpz_class> want;
            for (mpz_class v = 0; v < p; ++v)
                if (R.eval(f, v) == 0) want.push_back(v);
            EXPECT_EQ(R.roots(f), want);
        }
    }
}

TEST(Poly, RootsOfLargeModulusProducts) {
    mpz_class p("2971215073");
    PolyRing R(p);
    std::vector<mpz_class> rs = {5, 123456789, mpz_class("2971215000"), 77};
    Poly f = R.constant(1);
    for (auto& r : rs) f = R.mul(f, R.x_minus(r));
    f = R.mul(f, R.make({1, 0, 1}));  // adds two roots only when -1 is a residue
    auto got = R.roots(f);
    std::set<mpz_class> want(rs.begin(), rs.end());
    if (jacobi(mpz_class(-1), p) == 1) {
        EXPECT_EQ(got.size(), 6u);
    } else {
        EXPECT_EQ(std::set<mpz_class>(got.begin(), got.end()), want);
    }
    for (auto& r : got) EXPECT_EQ(R.eval(f, r), 0);
}

TEST(Poly, FactorsIntoKnownIrreducibles) {
    std::mt19937_64 rng(5);
    for (unsigned long p : {3UL, 5UL, 7UL, 13UL}) {
        PolyRing R{mpz_class(p)};
        // irreducibles of degree 2 and 3 are exactly the root-free monic ones
        std::vector<Poly> irr;
        for (int tries = 0; irr.size() < 4 && tries < 2000; ++tries) {
            Poly f = random_poly(R, 2 + tries % 2, rng);
            if (!has_root_brute(R, f) && std::find(irr.begin(), irr.end(), f) == irr.end()) irr.push_back(f);
        }
        ASSERT_EQ(irr.size(), 4u);
        Poly prod = R.mul(R.x_minus(1), R.x_minus(2));
        for (auto& f : irr) prod = R.mul(prod, f);
        auto fs = R.irreducible_factors(prod);
        std::set<std::vector<mpz_class>> got, want;
        for (auto& f : fs) got.insert(f.c);
        for (auto& f : irr) want.insert(f.c);
        want.insert(R.x_minus(1).c);
        want.insert(R.x_minus(2).c);
        EXPECT_EQ(got, want) << p;
    }
}

TEST(Poly, RepeatedFactorsAreCollapsed) {
    PolyRing R(mpz_class(10007));
    Poly a = R.make({3, 0, 1}), b = R.x_minus(9);
    Poly f = R.mul(R.mul(a, a), R.mul(b, R.mul(b, b)));
    auto fs = R.irreducible_factors(f);
    ASSERT_EQ(fs.size(), jacobi(mpz_class(-3), mpz_class(10007)) == 1 ? 3u : 2u);
}

TEST(Poly, CompositeModulusIsReported) {
    PolyRing R(mpz_class(4181));
    Poly b = R.make({1, 37});  // leading coefficient shares the factor 37
    try {
        R.rem(R.make({1, 2, 3}), b);
        FAIL() << "expected CompositeDetected";
    } catch (const CompositeDetected& e) {
        EXPECT_EQ(e.signal.factor, 37);
    }
}
