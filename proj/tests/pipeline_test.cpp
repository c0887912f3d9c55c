#include <gtest/gtest.h>

#include <algorithm>

#include "fibcurve/certificate.hpp"
#include "fibcurve/fibonacci.hpp"
#include "fibcurve/pipeline.hpp"

using namespace fibcurve;

namespace {

long legendre_small(long a, long p) {
    long r = 1, b = ((a % p) + p) % p, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 0 ? 0 : (r == 1 ? 1 : -1);
}

// #E(F_p) by summing Legendre symbols, independent of the library
long brute_count(const Curve& E) {
    long p = E.p.get_si(), a = E.a.get_si(), b = E.b.get_si();
    long n = 1;
    for (long x = 0; x < p; ++x) {
        long rhs = ((x * x % p) * x % p + a * x % p + b) % p;
        n += 1 + legendre_small(rhs, p);
    }
    return n;
}

bool is_prime_naive(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

const PipelineResult& cached_run(unsigned long q) {
    static std::map<unsigned long, PipelineResult> runs;
    auto it = runs.find(q);
    if (it == runs.end()) it = runs.emplace(q, construct(q)).first;
    return it->second;
}

}  // namespace

TEST(PrimeSet, Examples) {
    EXPECT_EQ(build_P_q(FibContext(11), 9), (std::vector<std::uint32_t>{5}));
    EXPECT_EQ(build_P_q(FibContext(7), 6), (std::vector<std::uint32_t>{3}));
    auto P = build_P_q(FibContext(11), 70);
    for (std::uint32_t l : {5u, 11u, 17u, 67u}) EXPECT_NE(std::find(P.begin(), P.end(), l), P.end()) << l;
    EXPECT_THROW(build_P_q(FibContext(11), 2), DomainError);
}

TEST(PrimeSet, MatchesEulerCriterion) {
    for (unsigned long q : {7UL, 11UL, 13UL, 17UL, 23UL, 29UL}) {
        FibContext ctx(q);
        std::vector<std::uint32_t> want;
        for (long l = 3; l <= 200; l += 2) {
            if (!is_prime_naive(l) || ctx.f_q == l) continue;
            if (legendre_small(mpz_class(ctx.f_q % l).get_si(), l) == 1) want.push_back(l);
        }
        EXPECT_EQ(build_P_q(ctx, 200), want) << q;
    }
}

TEST(GoodDiscriminants, Examples) {
    EXPECT_EQ(good_discriminants({3}).S, (std::vector<std::int64_t>{-3}));
    EXPECT_TRUE(good_discriminants({}).S.empty());
    auto S = good_discriminants({5, 11, 17, 67}).S;
    for (std::int64_t D : {-11, -67, -187}) EXPECT_NE(std::find(S.begin(), S.end(), D), S.end()) << D;
    for (std::int64_t D : {-5, -55, -85}) EXPECT_EQ(std::find(S.begin(), S.end(), D), S.end()) << D;
}

TEST(GoodDiscriminants, OrderAndMembership) {
    std::vector<std::uint32_t> P{3, 5, 7, 11, 13, 19, 23, 29, 31, 37, 43};
    auto S = good_discriminants(P).S;
    std::vector<std::int64_t> want;
    for (std::size_t k = 0; k < P.size(); ++k) {
        long s = -static_cast<long>(P[k]);
        if (((s % 8) + 8) % 8 == 5) want.push_back(s);
        for (std::size_t m = 0; m < k; ++m) {
            long d = -static_cast<long>(P[m] * P[k]);
            if (((d % 8) + 8) % 8 == 5) want.push_back(d);
        }
    }
    EXPECT_EQ(S, want);
    for (auto D : S) EXPECT_EQ(((D % 8) + 8) % 8, 5);
}

TEST(GoodDiscriminants, PrefixUnderLargerBound) {
    for (unsigned long q : {11UL, 13UL, 29UL, 47UL}) {
        FibContext ctx(q);
        auto small = good_discriminants(build_P_q(ctx, 30)).S;
        auto big = good_discriminants(build_P_q(ctx, 120)).S;
        ASSERT_LE(small.size(), big.size());
        EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin())) << q;
    }
}

TEST(DiscriminantSqrt, SquaresToD) {
    FibContext ctx(29);
    SqrtCache cache;
    cache.f = ctx.f_q;
    cache.sqrt_minus_one = std::get<mpz_class>(cassini_sqrt_minus_one(ctx));
    for (auto D : good_discriminants(build_P_q(ctx, 120)).S) {
        auto r = discriminant_sqrt(D, cache);
        ASSERT_FALSE(is_composite(r)) << D;
        mpz_class v = std::get<mpz_class>(r);
        EXPECT_EQ(mod(v * v - D, ctx.f_q), 0) << D;
    }
}

namespace {

Attempt run_attempt(unsigned long q, std::int64_t D) {
    FibContext ctx(q);
    SqrtCache cache;
    cache.f = ctx.f_q;
    cache.sqrt_minus_one = std::get<mpz_class>(cassini_sqrt_minus_one(ctx));
    ModularPolynomialSet tables;
    return attempt_discriminant(ctx, D, cache, Config{}, tables);
}

}  // namespace

TEST(Attempt, Q11MinusElevenFailsOnP) {
    EXPECT_EQ(mpz_class(4 * 89), mpz_class(81 + 11 * 25));
    auto a = run_attempt(11, -11);
    EXPECT_EQ(a.stage, Stage::PNotPrime);
    EXPECT_EQ(a.x, 9);
    ASSERT_EQ(a.ps.size(), 2u);
    EXPECT_EQ(a.ps[0].p, 81);
    EXPECT_EQ(a.ps[1].p, 99);
    EXPECT_FALSE(a.candidate);
}

TEST(Attempt, Q11MinusSixtySeven) {
    auto a = run_attempt(11, -67);
    EXPECT_EQ(a.x, 17);
    ASSERT_TRUE(a.candidate);
    EXPECT_EQ(a.candidate->p, 73);
    EXPECT_EQ(brute_count(a.candidate->E), 89);
    EXPECT_TRUE(on_curve(a.candidate->P, a.candidate->E));
}

TEST(Attempt, Q7MinusThreeUsesSexticTwists) {
    auto a = run_attempt(7, -3);
    EXPECT_EQ(a.x, 7);
    ASSERT_TRUE(a.candidate);
    EXPECT_EQ(a.candidate->p, 7);
    EXPECT_TRUE(a.candidate->special_j);
    EXPECT_EQ(a.candidate->E.a, 0);
    EXPECT_EQ(brute_count(a.candidate->E), 13);
}

TEST(Construct, DeskIndices) {
    for (unsigned long q : {7UL, 11UL, 13UL, 17UL, 23UL, 29UL}) {
        const auto& r = cached_run(q);
        ASSERT_EQ(r.verdict, Verdict::Constructed) << q << " " << r.failing_stage;
        ASSERT_TRUE(r.chosen);
        const Candidate& c = *r.chosen;
        mpz_class f = fib(q);
        EXPECT_EQ(brute_count(c.E), f) << q;
        EXPECT_TRUE(is_prime_naive(c.p.get_si())) << q;
        EXPECT_EQ(4 * f, c.x * c.x + mpz_class(static_cast<long>(-c.D)) * c.y * c.y);
        // p in the Hasse interval of f and f in that of p
        mpz_class t = c.p + 1 - f, s = f + 1 - c.p;
        EXPECT_LE(t * t, 4 * c.p) << q;
        EXPECT_LE(s * s, 4 * f) << q;
        EXPECT_LE(r.iterations, r.final_S_size) << q;
        EXPECT_LE(r.iterations, 40u) << q;
        auto v = verify_certificate(r.certificate);
        EXPECT_TRUE(v.accept) << q << " " << v.reason;
    }
}

TEST(Construct, LargerIndicesWithBsgs) {
    for (unsigned long q : {43UL, 47UL}) {
        const auto& r = cached_run(q);
        ASSERT_EQ(r.verdict, Verdict::Constructed) << q;
        EXPECT_EQ(r.certificate["order_evidence"]["count_method"], "bsgs");
        EXPECT_EQ(r.certificate["order_evidence"]["count"], fib(q).get_str());
        EXPECT_TRUE(verify_certificate(r.certificate).accept);
        EXPECT_LE(r.iterations, 40u);
    }
}

TEST(Construct, CompositeIndex19) {
    auto r = construct(19);
    EXPECT_EQ(r.verdict, Verdict::Composite);
    EXPECT_FALSE(r.failing_stage.empty());
    EXPECT_EQ(r.certificate["verdict"], "composite");
    EXPECT_EQ(r.certificate["failing_stage"], r.failing_stage);
    auto c = check_primality(19);
    EXPECT_EQ(c.verdict, Verdict::Composite);
    ASSERT_TRUE(c.signal);
    if (c.signal->factor != 0) EXPECT_TRUE(c.signal->factor == 37 || c.signal->factor == 113);
    EXPECT_THROW(construct(9), DomainError);
    EXPECT_THROW(construct(3), DomainError);
}

TEST(Construct, CheckProvesPrimes) {
    for (unsigned long q : {7UL, 11UL, 47UL, 83UL}) {
        auto r = check_primality(q);
        EXPECT_EQ(r.verdict, Verdict::Prime) << q;
        auto chain = ecpp_from_json(r.certificate["ecpp"]);
        EXPECT_EQ(chain.N, fib(q));
        EXPECT_TRUE(ecpp_check(chain).verified);
    }
}

TEST(Construct, Deterministic) {
    auto a = canonical_dump(construct(13).certificate);
    auto b = canonical_dump(construct(13).certificate);
    EXPECT_EQ(a, b);
    Config c;
    c.seed = 99;
    auto other = construct(13, c);
    EXPECT_TRUE(verify_certificate(other.certificate).accept);
    EXPECT_NE(other.certificate["config_hash"], construct(13).certificate["config_hash"]);
}

TEST(Construct, EmptyListPropagates) {
    Config c;
    c.initial_bound = 3;
    c.bound_cap = 3;
    auto r = construct(13, c);  // (233 | 3) = -1, so P_q and S_q are empty
    EXPECT_EQ(r.verdict, Verdict::Inconclusive);
    EXPECT_EQ(r.iterations, 0u);
    EXPECT_EQ(r.certificate["verification"]["input"], 0);
    EXPECT_EQ(r.certificate["likely_composite"], true);
}

TEST(Certificate, RoundTripAccepts) {
    const auto& r = cached_run(11);
    auto text = canonical_dump(r.certificate);
    auto back = parse_certificate(text);
    EXPECT_EQ(canonical_dump(back), text);
    EXPECT_TRUE(verify_certificate(back).accept);
    EXPECT_THROW(parse_certificate("{not json"), DomainError);
}

TEST(Certificate, TamperingRejected) {
    const auto& base = cached_run(11).certificate;
    auto c = base;
    c["chosen"]["x"] = mpz_class(parse_integer(c["chosen"]["x"].get<std::string>()) + 1).get_str();
    EXPECT_EQ(verify_certificate(c).reason, "norm-equation");

    // curve replaced by its twist, point by a point on the twist
    c = base;
    Curve E = curve_from_json(base["curve"]);
    Curve T = canonical_twist(E);
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(1);
    Point P = std::get<Point>(random_point(T, rng));
    c["curve"] = curve_to_json(T);
    c["point"] = point_to_json(P);
    EXPECT_EQ(verify_certificate(c).reason, "order-evidence");

    c = base;
    c["point"]["y"] = mpz_class(parse_integer(c["point"]["y"].get<std::string>()) + 1).get_str();
    EXPECT_EQ(verify_certificate(c).reason, "point-not-on-curve");

    c = base;
    c["f_q"] = "91";
    EXPECT_EQ(verify_certificate(c).reason, "fibonacci-value");

    c = base;
    c.erase("ecpp");
    EXPECT_FALSE(verify_certificate(c).accept);
}

TEST(Certificate, BrokenChainRejected) {
    auto c = cached_run(47).certificate;
    ASSERT_FALSE(c["ecpp"]["steps"].empty());
    c["ecpp"]["steps"][0]["k"] = "1";
    auto v = verify_certificate(c);
    EXPECT_FALSE(v.accept);
    EXPECT_EQ(v.reason.rfind("ecpp-chain", 0), 0u) << v.reason;
}

TEST(Config, ParseAndHash) {
    auto c = parse_config("# comment\nseed = 7\nbound_cap=128  # trailing\n\ntable_dir = \"/tmp/x\"\n");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.bound_cap, 128);
    EXPECT_EQ(c.table_dir, "/tmp/x");
    EXPECT_THROW(parse_config("colour = red"), DomainError);
    EXPECT_THROW(parse_config("seed"), DomainError);
    EXPECT_THROW(parse_config("seed = -1"), DomainError);
    EXPECT_THROW(load_config("/nonexistent/fibcurve.conf"), ResourceError);
    Config d;
    EXPECT_EQ(config_hash(d), config_hash(Config{}));
    EXPECT_NE(config_hash(c), config_hash(d));
    EXPECT_EQ(config_hash(d).size(), 16u);
}
