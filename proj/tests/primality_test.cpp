#include <gtest/gtest.h>

#include <random>

#include "fibcurve/modarith.hpp"
#include "fibcurve/primality.hpp"

using namespace fibcurve;

namespace {

std::vector<bool> sieve(std::size_t n) {
    std::vector<bool> p(n + 1, true);
    p[0] = p[1] = false;
    for (std::size_t i = 2; i * i <= n; ++i)
        if (p[i])
            for (std::size_t j = i * i; j <= n; j += i) p[j] = false;
    return p;
}

int euler_symbol(long a, long p) {
    long r = 1, b = ((a % p) + p) % p, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 0 ? 0 : (r == 1 ? 1 : -1);
}

// brute order of E over F_p for small p
long brute_order(long p, long a, long b) {
    long n = 1;
    for (long x = 0; x < p; ++x) n += 1 + euler_symbol(x * x % p * x + a * x + b, p);
    return n;
}

}  // namespace

TEST(Density, Examples) {
    EXPECT_EQ(density_test(1597).verdict, DensityVerdict::Plausible);
    EXPECT_EQ(density_test(1105).verdict, DensityVerdict::Plausible);
    auto r = density_test(1369);
    EXPECT_EQ(r.verdict, DensityVerdict::Suspicious);
    EXPECT_THROW(density_test(1000), DomainError);
}

TEST(Density, SymbolsMatchEulerCriterion) {
    auto r = density_test(1597);
    for (auto ell : r.scanned) {
        int s = euler_symbol(ell, 1597);
        bool listed = std::find(r.residues.begin(), r.residues.end(), ell) != r.residues.end();
        EXPECT_EQ(listed, s == 1) << ell;
    }
    ASSERT_TRUE(r.first_nonresidue);
    EXPECT_EQ(euler_symbol(*r.first_nonresidue, 1597), -1);
}

TEST(Density, HalfOfScannedPrimesAreResidues) {
    auto isp = sieve(1000000);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> pick(10000, 1000000);
    int done = 0;
    while (done < 100) {
        long p = pick(rng);
        if (!isp[p]) continue;
        ++done;
        auto r = density_test(p);
        double frac = double(r.residues.size()) / double(r.scanned.size());
        EXPECT_GE(frac, 0.3) << p;
        EXPECT_LE(frac, 0.7) << p;
        EXPECT_EQ(r.verdict, DensityVerdict::Plausible) << p;
    }
}

TEST(RabinMiller, Examples) {
    EXPECT_TRUE(rabin_miller(233).probable_prime);
    auto c = rabin_miller(4181);
    EXPECT_FALSE(c.probable_prime);
    ASSERT_TRUE(c.witness);
    EXPECT_FALSE(rabin_miller(1025).probable_prime);
    EXPECT_THROW(rabin_miller(10), DomainError);
}

TEST(RabinMiller, FixedBasesExactBelow1e5) {
    auto isp = sieve(100000);
    for (long n = 5; n < 100000; n += 2)
        ASSERT_EQ(rabin_miller_fixed(n).probable_prime, bool(isp[n])) << n;
}

TEST(RabinMiller, RandomBasesNeverRejectPrimes) {
    auto isp = sieve(100000);
    for (long n = 5; n < 100000; n += 2)
        if (isp[n]) ASSERT_TRUE(rabin_miller(n, 5, n).probable_prime) << n;
}

TEST(EcppBound, MatchesFloatingPoint) {
    for (long N = 7; N < 5000; N += 2) {
        double b = std::pow(std::pow(double(N), 0.25) + 1, 2);
        for (long q = 2; q < 200; ++q) {
            if (std::abs(q - b) < 1e-6) continue;
            ASSERT_EQ(exceeds_ecpp_bound(q, N), q > b) << N << " " << q;
        }
    }
    EXPECT_FALSE(exceeds_ecpp_bound(15, 89));
    EXPECT_TRUE(exceeds_ecpp_bound(17, 89));
}

TEST(EasySplit, Examples) {
    auto s = easy_split(106, 89);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->first, 2);
    EXPECT_EQ(s->second, 53);
    EXPECT_FALSE(easy_split(20, 13));  // 5 is below the bound
    EXPECT_FALSE(easy_split(8, 13));
    auto t = easy_split(mpz_class(4) * 1000003, mpz_class(4000000));
    ASSERT_TRUE(t);
    EXPECT_EQ(t->second, 1000003);
}

namespace {

// curve over F_89 with j a root of H_{-67} and exactly 107 points
std::optional<EcppStep> step_89() {
    auto rr = root_mod(hilbert_analytic(-67), 89);
    for (const auto& r : rr.all) {
        Curve E = std::get<Curve>(curve_from_j(r, 89));
        for (const Curve& C : {E, canonical_twist(E)}) {
            long n = brute_order(89, C.a.get_si(), C.b.get_si());
            if (n != 107) continue;
            for (long x = 0; x < 89; ++x)
                for (long y = 1; y < 89; ++y)
                    if ((y * y - (x * x * x + C.a.get_si() * x + C.b.get_si())) % 89 == 0) {
                        EcppStep s;
                        s.N = 89;
                        s.D = -67;
                        s.x = 17;
                        s.y = 1;
                        s.m = 107;
                        s.k = 1;
                        s.q = 107;
                        s.E = C;
                        s.P = Point::affine(x, y);
                        return s;
                    }
        }
    }
    return std::nullopt;
}

}  // namespace

TEST(Ecpp, WorkedExample89) {
    EXPECT_EQ(mpz_class(4 * 89), mpz_class(17 * 17 + 67));
    auto s = step_89();
    ASSERT_TRUE(s);
    auto c = ecpp_check_step(*s);
    EXPECT_TRUE(c.verified) << c.reason;
    EcppCertificate cert{89, {*s}};
    EXPECT_TRUE(ecpp_check(cert).verified);
}

TEST(Ecpp, ForgedSmallCofactorRefuted) {
    auto s = step_89();
    ASSERT_TRUE(s);
    s->D = 0;
    s->m = 105;
    s->k = 7;
    s->q = 15;
    auto c = ecpp_check_step(*s);
    EXPECT_FALSE(c.verified);
    EXPECT_NE(c.reason.find("bound"), std::string::npos) << c.reason;
}

TEST(Ecpp, TamperedStepsRefuted) {
    auto s = step_89();
    ASSERT_TRUE(s);
    auto bad = *s;
    bad.x = 19;
    EXPECT_FALSE(ecpp_check_step(bad).verified);
    bad = *s;
    bad.P = Point::affine(bad.P.x, bad.P.y + 1);
    EXPECT_FALSE(ecpp_check_step(bad).verified);
    EcppCertificate broken{97, {*s}};
    EXPECT_FALSE(ecpp_check(broken).verified);
}

TEST(Ecpp, CompositeSubjectRefuted) {
    auto p = ecpp_prove(4181);
    ASSERT_TRUE(is_composite(p));
    auto f = std::get<CompositeSignal>(p).factor;
    EXPECT_TRUE(f == 37 || f == 113);
    EXPECT_FALSE(ecpp_check(EcppCertificate{4181, {}}).verified);
    // 4181 with a curve whose orders mimic a prime: some clause must fail
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(3);
    for (int i = 0; i < 40; ++i) {
        mpz_class a = rng.get_z_range(4181), x = rng.get_z_range(4181), y = rng.get_z_range(4181);
        mpz_class b = mod(y * y - x * x * x - a * x, 4181);
        EcppStep s;
        s.N = 4181;
        s.E = Curve{4181, a, b};
        s.P = Point::affine(x, y);
        s.m = 4181 + 1 - 2 * i;
        auto sp = easy_split(s.m, 4181);
        if (!sp) continue;
        s.k = sp->first;
        s.q = sp->second;
        EXPECT_FALSE(ecpp_check_step(s).verified);
    }
}

TEST(Ecpp, VerifiedImpliesPrimeBelowFloor) {
    auto isp = sieve(1000000);
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(11);
    int composite_trials = 0, verified = 0;
    for (long N = 1001; N < 1000000; N += 997 * 2) {
        if (N % 3 == 0) continue;
        // a step built from a random point, with m ranging across the Hasse window
        for (int t = 0; t < 8; ++t) {
            mpz_class a = rng.get_z_range(N), x = rng.get_z_range(N), y = rng.get_z_range(N);
            mpz_class b = mod(y * y - x * x * x - a * x, mpz_class(N));
            long span = 2 * static_cast<long>(std::sqrt(double(N))) + 1;
            mpz_class m = N + 1 - span + rng.get_z_range(2 * span + 1);
            auto sp = easy_split(m, N);
            if (!sp) continue;
            EcppStep s;
            s.N = N;
            s.E = Curve{N, a, b};
            s.P = Point::affine(x, y);
            s.m = m;
            s.k = sp->first;
            s.q = sp->second;
            bool ok = ecpp_check(EcppCertificate{N, {s}}).verified;
            if (!isp[N]) {
                ++composite_trials;
                ASSERT_FALSE(ok) << N;
            }
            verified += ok;
        }
        bool trivial = ecpp_check(EcppCertificate{N, {}}).verified;
        ASSERT_EQ(trivial, bool(isp[N])) << N;
    }
    EXPECT_GT(composite_trials, 100);
}

TEST(Ecpp, ProveAndCheckLargePrimes) {
    for (const char* n : {"1000000007", "2971215073", "99194853094755497", "1066340417491710595814572169"}) {
        mpz_class N(n);
        auto r = ecpp_prove(N, 5);
        ASSERT_FALSE(is_composite(r)) << n;
        auto& c = std::get<std::optional<EcppCertificate>>(r);
        ASSERT_TRUE(c) << n;
        EXPECT_TRUE(ecpp_check(*c).verified) << n;
        for (const auto& s : c->steps) {
            EXPECT_EQ(s.m, s.k * s.q);
            EXPECT_EQ(4 * s.N, s.x * s.x + mpz_class(static_cast<long>(-s.D)) * s.y * s.y);
        }
    }
    EXPECT_TRUE(is_composite(ecpp_prove(mpz_class("1000000007") * 1000003)));
}

TEST(Exceptional, FieldDiscriminants) {
    EXPECT_EQ(exceptional_field_discriminant(-1, 7), -4);
    EXPECT_EQ(exceptional_field_discriminant(-2, 7), -8);
    EXPECT_EQ(exceptional_field_discriminant(-3, 7), -3);
    EXPECT_EQ(exceptional_field_discriminant(-7, 11), -7);
    EXPECT_EQ(exceptional_field_discriminant(-11, 11), -11);
    EXPECT_EQ(exceptional_field_discriminant(-13, 13), -52);
}

TEST(Exceptional, Q7WalkThrough) {
    auto r = exceptional_cases_test(FibContext(7));
    EXPECT_EQ(r.verdict, ExceptionalVerdict::ProbablePrime);
    ASSERT_GE(r.branches.size(), 3u);
    EXPECT_EQ(r.branches[0].d, -1);
    EXPECT_EQ(r.branches[0].symbol, 1);
    EXPECT_NE(r.branches[0].outcome.find("x = 6"), std::string::npos);
    EXPECT_EQ(r.branches[2].d, -3);
    EXPECT_EQ(r.branches[2].symbol, 1);
    EXPECT_NE(r.branches[2].outcome.find("x = 7"), std::string::npos);
    EXPECT_FALSE(r.certificate);
}

TEST(Exceptional, Q11CassiniBranchProves) {
    EXPECT_EQ(mpz_class(4 * 89), mpz_class(16 * 16 + 4 * 25));
    auto r = exceptional_cases_test(FibContext(11));
    EXPECT_EQ(r.verdict, ExceptionalVerdict::Prime);
    ASSERT_TRUE(r.certificate);
    const auto& s = r.certificate->steps.front();
    EXPECT_EQ(s.D, -4);
    EXPECT_EQ(s.x, 16);
    EXPECT_EQ(s.m, 106);
    EXPECT_EQ(s.q, 53);
    EXPECT_EQ(s.E.b, 0);  // j = 1728
    EXPECT_EQ(brute_order(89, s.E.a.get_si(), 0), 106);
    EXPECT_TRUE(ecpp_check(*r.certificate).verified);
}

TEST(Exceptional, Q13NormEquationForMinus52) {
    auto r = sqrt_mod(mpz_class(233 - 52), 233);
    ASSERT_FALSE(is_composite(r));
    auto s = cornacchia_4n(-52, 233, std::get<mpz_class>(r));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->first, 10);
    EXPECT_EQ(s->second, 4);
    EXPECT_EQ(mpz_class(233), mpz_class(25 + 13 * 16));
}

TEST(Exceptional, NeverCompositeForPrimeFq) {
    for (unsigned long q : {5UL, 7UL, 11UL, 13UL, 17UL, 23UL, 29UL}) {
        FibContext ctx(q);
        auto r = exceptional_cases_test(ctx);
        EXPECT_NE(r.verdict, ExceptionalVerdict::Composite) << q;
        if (r.certificate) EXPECT_TRUE(ecpp_check(*r.certificate).verified) << q;
        for (const auto& b : r.branches) {
            long ell = b.d == -1 ? 0 : -b.d;
            if (ell >= 3 && ell % 2 == 1 && mpz_class(ell) != ctx.f_q) {
                long fm = mpz_class(ctx.f_q % ell).get_si();
                int direct = euler_symbol(fm, ell) * ((ell % 4 == 3 && ctx.f_q % 4 == 3) ? -1 : 1) *
                             (mpz_class(ctx.f_q % 4) == 1 ? 1 : -1);
                EXPECT_EQ(b.symbol, direct) << q << " " << b.d;
            }
        }
    }
}
