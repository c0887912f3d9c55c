#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fibcurve/classpoly.hpp"
#include "fibcurve/modarith.hpp"
#include "fibcurve/modpoly.hpp"
#include "fibcurve/qseries.hpp"

using namespace fibcurve;

namespace {

// naive truncated power series, index = exponent
using Series = std::vector<mpz_class>;

Series series_mul(const Series& a, const Series& b, std::size_t n) {
    Series r(n, 0);
    for (std::size_t i = 0; i < n && i < a.size(); ++i)
        for (std::size_t j = 0; i + j < n && j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// q * j(q) through q^(n-1), from E4^3 and prod(1-q^k)^24 by schoolbook arithmetic
Series qj_naive(std::size_t n) {
    Series e4(n, 0);
    e4[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        mpz_class s = 0;
        for (std::size_t d = 1; d <= k; ++d)
            if (k % d == 0) s += mpz_class(static_cast<unsigned long>(d * d * d));
        e4[k] = 240 * s;
    }
    Series prod(n, 0);
    prod[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        Series f(n, 0);
        f[0] = 1;
        f[k] = -1;
        prod = series_mul(prod, f, n);
    }
    Series p24(n, 0);
    p24[0] = 1;
    for (int i = 0; i < 24; ++i) p24 = series_mul(p24, prod, n);
    // invert p24
    Series inv(n, 0);
    inv[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        mpz_class s = 0;
        for (std::size_t i = 1; i <= k; ++i) s += p24[i] * inv[k - i];
        inv[k] = -s;
    }
    return series_mul(series_mul(series_mul(e4, e4, n), e4, n), inv, n);
}

// all roots of a polynomial mod a small prime, by evaluation
std::vector<mpz_class> brute_roots(const std::vector<mpz_class>& c, unsigned long p) {
    std::vector<mpz_class> out;
    for (unsigned long x = 0; x < p; ++x) {
        mpz_class v = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = mod(v * x + *it, mpz_class(p));
        if (v == 0) out.push_back(x);
    }
    return out;
}

std::uint64_t brute_count(std::uint64_t p, std::uint64_t a, std::uint64_t b) {
    std::uint64_t n = 1;
    for (std::uint64_t x = 0; x < p; ++x)
        for (std::uint64_t y = 0; y < p; ++y)
            if ((y * y) % p == (x * x % p * x + a * x + b) % p) ++n;
    return n;
}

const ModularPolynomialSet& tables() {
    static ModularPolynomialSet t(default_table_dir());
    return t;
}

std::vector<std::int64_t> fundamental_upto(std::int64_t bound) {
    std::vector<std::int64_t> out;
    for (std::int64_t D = -3; D >= -bound; --D)
        if (is_fundamental(D)) out.push_back(D);
    return out;
}

}  // namespace

TEST(QSeries, JCoefficientsMatchSchoolbook) {
    auto naive = qj_naive(12);
    Laurent j = j_series(10);
    EXPECT_EQ(j.low, -1);
    for (long n = -1; n < 10; ++n) EXPECT_EQ(j.coeff(n), naive[n + 1]) << n;
    EXPECT_EQ(j.coeff(0), 744);
    EXPECT_EQ(j.coeff(1), 196884);
    EXPECT_EQ(j.coeff(2), 21493760);
}

TEST(ModPoly, Phi2KnownShape) {
    const auto& phi = tables().get(2);
    EXPECT_EQ(phi.coeff(3, 0), 1);
    EXPECT_EQ(phi.coeff(2, 2), -1);
    EXPECT_EQ(phi.coeff(2, 1), 1488);
    EXPECT_EQ(phi.coeff(1, 2), 1488);
    EXPECT_EQ(phi.coeff(1, 1), 40773375);
    EXPECT_EQ(phi.coeff(2, 0), -162000);
    EXPECT_EQ(phi.coeff(1, 0), 8748000000);
    EXPECT_EQ(phi.coeff(0, 0), mpz_class("-157464000000000"));
}

TEST(ModPoly, Phi2VanishesOnSchoolbookSeries) {
    // Phi_2(j(q^2), j(q)) = 0, checked on q^2 j(q^2) and q j(q) with 24 terms
    const std::size_t n = 24;
    auto qj = qj_naive(n);
    Series qj2(n, 0);
    for (std::size_t k = 0; 2 * k < n; ++k) qj2[2 * k] = qj[k];
    // sum over monomials X^a Y^b scaled by q^(6): X = qj2 / q^2, Y = qj / q
    const auto& phi = tables().get(2);
    Series total(n, 0);
    for (unsigned a = 0; a <= 3; ++a) {
        for (unsigned b = 0; b <= 3; ++b) {
            mpz_class c = phi.coeff(a, b);
            if (c == 0) continue;
            Series term(n, 0);
            term[0] = 1;
            for (unsigned i = 0; i < a; ++i) term = series_mul(term, qj2, n);
            for (unsigned i = 0; i < b; ++i) term = series_mul(term, qj, n);
            unsigned shift = 2 * (3 - a) + (3 - b);  // bring everything to q^-9
            for (std::size_t k = 0; k + shift < n; ++k) total[k + shift] += c * term[k];
        }
    }
    for (std::size_t k = 0; k + 9 < n; ++k) EXPECT_EQ(total[k], 0) << k;
}

TEST(ModPoly, TablesSymmetricAndValid) {
    for (unsigned ell : {2u, 3u, 5u, 7u}) {
        const auto& phi = tables().get(ell);
        EXPECT_EQ(phi.coeff(ell + 1, 0), 1);
        for (unsigned i = 0; i <= ell + 1; ++i)
            for (unsigned j = 0; j <= ell + 1; ++j) EXPECT_EQ(phi.coeff(i, j), phi.coeff(j, i));
        EXPECT_NO_THROW(validate_modular_polynomial(phi));
        EXPECT_EQ(generate_modular_polynomial(ell).coeffs, phi.coeffs) << ell;
    }
}

TEST(ModPoly, RejectsCorruptedTable) {
    auto phi = tables().get(3);
    std::string text = serialize_modular_polynomial(phi);
    EXPECT_EQ(parse_modular_polynomial(text).coeffs, phi.coeffs);
    auto bad = phi;
    bad.coeffs[{2, 1}] += 1;
    EXPECT_THROW(validate_modular_polynomial(bad), InternalError);
    EXPECT_THROW(parse_modular_polynomial(text + "\n3 1 0 5\n"), DomainError);
    EXPECT_THROW(load_modular_polynomial("/nonexistent", 2), ResourceError);
}

TEST(ClassPoly, JSpecialValues) {
    auto ji = j_at_form(QuadForm{1, 0, 1}, 40);
    EXPECT_EQ(ji.nearest, 1728);
    EXPECT_LT(ji.residue, 1e-30);
    auto jr = j_at_form(QuadForm{1, 1, 1}, 40);
    EXPECT_EQ(jr.nearest, 0);
    EXPECT_LT(jr.residue, 1e-25);
    mpz_class c = 640320;
    auto j163 = j_at_form(QuadForm{1, 1, 41}, 60);
    EXPECT_EQ(j163.nearest, -c * c * c);
    auto jt = j_from_tau("0", "1", 30);
    EXPECT_EQ(jt.nearest, 1728);
    EXPECT_THROW(j_from_tau("0", "0.5", 30), DomainError);
}

TEST(ClassPoly, HeegnerNumbers) {
    const std::vector<std::pair<std::int64_t, long>> cases{
        {-7, 15}, {-8, 20}, {-11, 32}, {-19, 96}, {-43, 960}, {-67, 5280}, {-163, 640320}};
    for (auto [D, r] : cases) {
        auto H = hilbert_analytic(D);
        mpz_class cube = mpz_class(r) * r * r;
        if (D == -8) {
            EXPECT_EQ(H.coeffs, (std::vector<mpz_class>{-cube, 1})) << D;
        } else {
            EXPECT_EQ(H.coeffs, (std::vector<mpz_class>{cube, 1})) << D;
        }
    }
    EXPECT_EQ(hilbert_analytic(-3).coeffs, (std::vector<mpz_class>{0, 1}));
    EXPECT_EQ(hilbert_analytic(-4).coeffs, (std::vector<mpz_class>{-1728, 1}));
}

TEST(ClassPoly, MinusFifteen) {
    // roots (-191025 +- 85995 sqrt 5) / 2
    mpz_class s = 191025, t = 85995;
    mpz_class prod = (s * s - 5 * t * t) / 4;
    auto H = hilbert_analytic(-15);
    EXPECT_EQ(H.coeffs, (std::vector<mpz_class>{prod, s, 1}));
    EXPECT_EQ(prod, -121287375);
}

TEST(ClassPoly, DegreeAndCubeProperty) {
    for (auto D : fundamental_upto(200)) {
        auto H = hilbert_analytic(D);
        ASSERT_EQ(H.degree(), static_cast<int>(class_number(D))) << D;
        EXPECT_EQ(H.coeffs.back(), 1);
        EXPECT_TRUE(is_cube(H.coeffs.front())) << D;
        EXPECT_LT(H.max_residue, 0.01);
    }
}

TEST(ClassPoly, ExplicitLowPrecisionIsUnstable) {
    EXPECT_THROW(hilbert_analytic(-3827, 12), RoundingUnstable);
}

TEST(ClassPoly, CrtAgreesWithAnalytic) {
    std::mt19937_64 rng(7);
    for (auto D : fundamental_upto(200)) {
        if (mod(mpz_class(static_cast<long>(D)), 8) != 5) continue;
        if (class_number(D) > 6) continue;
        auto A = hilbert_analytic(D);
        auto C = hilbert_crt_integer(D, tables());
        EXPECT_EQ(A.coeffs, C.coeffs) << D;
        for (int k = 0; k < 3; ++k) {
            unsigned long p = 0;
            while (!is_prime_u64(p)) p = 1000 + rng() % 1000000;
            EXPECT_EQ(hilbert_crt(D, p, tables()).coeffs, A.reduce_mod(p).coeffs) << D << " " << p;
        }
    }
}

TEST(ClassPoly, CrtHandlesNonFundamentalStructure) {
    for (std::int64_t D : {-15, -23, -39, -56, -71, -84}) {
        EXPECT_EQ(hilbert_crt_integer(D, tables()).coeffs, hilbert_analytic(D).coeffs) << D;
    }
}

TEST(ClassPoly, RootCountIsZeroOrH) {
    for (std::int64_t D : {-23, -47, -71, -87}) {
        auto H = hilbert_analytic(D);
        std::uint64_t h = class_number(D);
        for (auto p : primes_up_to(700)) {
            if (kronecker(mpz_class(static_cast<long>(D)), mpz_class(p)) != 1) continue;
            auto roots = brute_roots(H.coeffs, p);
            std::vector<mpz_class> deriv;
            for (std::size_t i = 1; i < H.coeffs.size(); ++i) deriv.push_back(H.coeffs[i] * static_cast<unsigned long>(i));
            bool repeated = false;
            for (const auto& r : roots)
                for (const auto& z : brute_roots(deriv, p)) repeated |= (z == r);
            if (repeated) continue;  // p divides disc(H)
            EXPECT_TRUE(roots.empty() || roots.size() == h) << D << " " << p;
            bool principal = false;
            for (long y = 1; y * y * (-D) <= 4L * p; ++y) {
                long r = 4L * p + D * y * y;
                long x = static_cast<long>(std::llround(std::sqrt(static_cast<double>(r))));
                if (x * x == r) principal = true;
            }
            EXPECT_EQ(roots.size() == h, principal) << D << " " << p;
            auto rr = root_mod(H, p);
            EXPECT_EQ(rr.all, roots);
        }
    }
}

TEST(ClassPoly, RootModExamples) {
    auto H67 = hilbert_analytic(-67);
    auto r = root_mod(H67, 73);
    ASSERT_TRUE(r.root);
    EXPECT_EQ(*r.root, 46);
    EXPECT_EQ(mod(H67.coeffs[0], 73), 27);

    auto H7 = hilbert_analytic(-7);
    auto r3 = root_mod(H7, 3);
    EXPECT_TRUE(r3.special_only);
    EXPECT_EQ(r3.all, (std::vector<mpz_class>{0}));

    auto H15 = hilbert_analytic(-15);
    auto r61 = root_mod(H15, 61);
    EXPECT_EQ(r61.all, brute_roots(H15.coeffs, 61));
    EXPECT_EQ(root_mod(hilbert_analytic(-4), 13).special_only, true);
}

TEST(CrtPlan, FirstCandidates) {
    auto c7 = plan_candidates(-7, {2, 3, 5, 7});
    ASSERT_FALSE(c7.empty());
    EXPECT_EQ(c7[0].eta, 11u);
    EXPECT_EQ(c7[0].t, 4);
    EXPECT_EQ(c7[0].v, 2);
    auto c67 = plan_candidates(-67, {2, 3, 5, 7});
    EXPECT_EQ(c67[0].eta, 17u);
    EXPECT_EQ(c67[0].t, 1);
    auto c15 = plan_candidates(-15, {2, 3, 5, 7});
    EXPECT_EQ(c15[0].eta, 19u);
    EXPECT_EQ(c15[0].v, 2);
    for (std::int64_t D : {-7, -15, -67, -403}) {
        for (const auto& pp : plan_candidates(D, {2, 3, 5, 7}, 20000)) {
            EXPECT_EQ(static_cast<std::int64_t>(4 * pp.eta), pp.t * pp.t + pp.v * pp.v * (-D));
            EXPECT_TRUE(is_prime_trial(pp.eta));
            EXPECT_EQ(210 % pp.v, 0);
        }
    }
}

TEST(CrtPlan, BoundCoversCoefficients) {
    for (std::int64_t D : {-15, -23, -71, -191}) {
        auto plan = build_crt_plan(D);
        double prod = 0;
        for (const auto& pp : plan.primes) prod += std::log(static_cast<double>(pp.eta));
        EXPECT_GT(prod, std::log(4.0) + plan.log_bound);
        for (const auto& c : hilbert_analytic(D).coeffs) {
            if (c == 0) continue;
            EXPECT_LT(std::log(std::abs(c.get_d())), plan.log_bound) << D;
        }
    }
}

TEST(Sampler, SmallFieldsAgreeWithEnumeration) {
    for (auto [eta, t] : {std::pair<std::uint64_t, std::int64_t>{11, 4}, {13, 2}, {7, -4}, {101, 7}}) {
        auto j = ell_t_curve_sample(eta, t);
        ASSERT_TRUE(j) << eta;
        auto [a, b] = curve_with_j_small(eta, *j);
        std::uint64_t n = brute_count(eta, a, b);
        EXPECT_TRUE(n == eta + 1 - std::llabs(t) || n == eta + 1 + std::llabs(t)) << eta;
        EXPECT_EQ(count_points_small(eta, a, b), n);
        // the j-invariant really is j
        std::uint64_t a3 = a * a % eta * a % eta;
        std::uint64_t den = (4 * a3 + 27 * (b * b % eta)) % eta;
        EXPECT_EQ(mod(mpz_class(1728) * 4 * a3 * *invmod(den, eta), eta), *j);
    }
    // 4*5 - 16 = 4 gives t = 4 on F_5; no curve over F_5 with trace 5
    EXPECT_THROW(ell_t_curve_sample(5, 5), DomainError);
}

TEST(Sampler, RandomModeFindsTrace) {
    const std::uint64_t eta = 100003;
    for (std::int64_t t : {1, 17, 300}) {
        auto j = ell_t_curve_sample(eta, t, 3);
        ASSERT_TRUE(j);
        auto [a, b] = curve_with_j_small(eta, *j);
        std::uint64_t n = count_points_small(eta, a, b);
        EXPECT_TRUE(n == eta + 1 - t || n == eta + 1 + t) << t;
    }
}

TEST(Volcano, OrbitIsRootSetOfH) {
    for (std::int64_t D : {-23, -71, -191, -403}) {
        auto H = hilbert_analytic(D);
        auto plan = build_crt_plan(D);
        for (std::size_t k = 0; k < 3 && k < plan.primes.size(); ++k) {
            const auto& pp = plan.primes[k];
            auto j0 = ell_t_curve_sample(pp.eta, pp.t);
            ASSERT_TRUE(j0);
            auto orbit = volcano_surface_walk(*j0, pp, D, tables());
            std::vector<mpz_class> as_mpz(orbit.begin(), orbit.end());
            EXPECT_EQ(as_mpz, brute_roots(H.reduce_mod(pp.eta).coeffs, pp.eta)) << D << " " << pp.eta;
            for (auto j : orbit) {
                auto [a, b] = curve_with_j_small(pp.eta, j);
                std::uint64_t n = count_points_small(pp.eta, a, b);
                EXPECT_TRUE(n == pp.eta + 1 - pp.t || n == pp.eta + 1 + pp.t);
            }
        }
    }
}
