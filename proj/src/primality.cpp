#include "fibcurve/primality.hpp"

#include "fibcurve/modarith.hpp"
#include "fibcurve/qforms.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fibcurve {

std::string to_string(DensityVerdict v) { return v == DensityVerdict::Plausible ? "plausible" : "suspicious"; }

std::string to_string(ExceptionalVerdict v) {
    switch (v) {
        case ExceptionalVerdict::Prime: return "prime";
        case ExceptionalVerdict::Composite: return "composite";
        default: return "probable-prime";
    }
}

DensityReport density_test(const mpz_class& N) {
    if (N <= 3 || mpz_even_p(N.get_mpz_t())) throw DomainError("density_test: N must be odd and greater than 3");
    DensityReport rep;
    rep.N = N;
    const double l = std::log(N.get_d());
    rep.scan_bound = 2 * l * l;
    if (N <= 1000) rep.notes.push_back("N <= 1000: the non-residue bound 2 ln^2 N is not guaranteed");
    auto primes = primes_up_to(static_cast<std::uint32_t>(std::max(rep.scan_bound, 300.0)));
    for (auto ell : primes) {
        if (ell > rep.scan_bound) break;
        if (mpz_class(ell) == N) continue;
        rep.scanned.push_back(ell);
        int s = jacobi(mpz_class(ell), N);
        if (s == 1) rep.residues.push_back(ell);
        if (s == 0) rep.notes.push_back("shares the factor " + std::to_string(ell));
    }
    unsigned trials = 0;
    for (auto ell : primes) {
        if (mpz_class(ell) == N) continue;
        if (trials == DensityReport::kTrialLimit) break;
        ++trials;
        if (jacobi(mpz_class(ell), N) == -1) {
            rep.first_nonresidue = ell;
            break;
        }
    }
    rep.trials_to_nonresidue = trials;
    if (!rep.first_nonresidue) {
        rep.verdict = DensityVerdict::Suspicious;
        rep.notes.push_back("no non-residue among the first 50 primes");
    }
    rep.expected_residues = rep.scanned.size() / 2.0;
    double got = static_cast<double>(rep.residues.size());
    if (got > 2 * rep.expected_residues || got < rep.expected_residues / 2) {
        rep.verdict = DensityVerdict::Suspicious;
        rep.notes.push_back("residue count " + std::to_string(rep.residues.size()) + " far from half of " +
                            std::to_string(rep.scanned.size()));
    }
    return rep;
}

namespace {

bool strong_probable_prime(const mpz_class& N, const mpz_class& a) {
    mpz_class d = N - 1;
    unsigned long e = mpz_scan1(d.get_mpz_t(), 0);
    d >>= e;
    mpz_class b = powmod(a, d, N);
    if (b == 1 || b == N - 1) return true;
    for (unsigned long k = 1; k < e; ++k) {
        b = b * b % N;
        if (b == N - 1) return true;
    }
    return false;
}

RabinMillerResult run_bases(const mpz_class& N, const std::vector<mpz_class>& bases) {
    RabinMillerResult r;
    r.bases = bases;
    for (const auto& a0 : bases) {
        mpz_class a = a0 % N;
        if (a < 2 || a > N - 2) continue;
        if (!strong_probable_prime(N, a)) {
            r.probable_prime = false;
            r.witness = a0;
            return r;
        }
    }
    return r;
}

}  // namespace

RabinMillerResult rabin_miller(const mpz_class& N, unsigned witness_count, std::uint64_t seed) {
    if (N <= 3 || mpz_even_p(N.get_mpz_t())) throw DomainError("rabin_miller: N must be odd and greater than 3");
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(static_cast<unsigned long>(seed) + 0x5eed);
    std::vector<mpz_class> bases;
    for (unsigned i = 0; i < witness_count; ++i) bases.push_back(2 + rng.get_z_range(N - 3));
    return run_bases(N, bases);
}

RabinMillerResult rabin_miller_fixed(const mpz_class& N) {
    if (N <= 3 || mpz_even_p(N.get_mpz_t())) throw DomainError("rabin_miller: N must be odd and greater than 3");
    std::vector<mpz_class> bases;
    for (auto p : primes_up_to(71)) bases.push_back(p);
    return run_bases(N, bases);
}

bool exceeds_ecpp_bound(const mpz_class& q, const mpz_class& N) {
    if (q <= 1) return false;
    // sqrt(q) - 1 > N^(1/4)  <=>  q^2 + 6q + 1 - N > 4 sqrt(q) (q + 1)
    mpz_class L = q * q + 6 * q + 1 - N;
    if (L <= 0) return false;
    mpz_class rhs = 16 * q * (q + 1) * (q + 1);
    return L * L > rhs;
}

namespace {

EcppCheck refute(const std::string& why, const mpz_class& factor = 0) {
    EcppCheck c;
    c.verified = false;
    c.reason = why;
    c.factor = factor;
    return c;
}

}  // namespace

EcppCheck ecpp_check_step(const EcppStep& s) {
    const mpz_class& N = s.N;
    if (N <= 6) return refute("subject too small");
    mpz_class g6 = gcd(N, mpz_class(6));
    if (g6 != 1) return refute("subject shares a factor with 6", g6);
    if (s.E.p != N) return refute("curve modulus differs from the subject");
    mpz_class disc = mod(4 * s.E.a * s.E.a * s.E.a + 27 * s.E.b * s.E.b, N);
    mpz_class gd = gcd(disc, N);
    if (gd != 1) return refute("curve discriminant not invertible", gd == N ? mpz_class(0) : gd);
    if (s.P.inf || !on_curve(s.P, s.E)) return refute("point not on curve");
    if (s.D != 0) {
        if (4 * N != s.x * s.x + (-s.D) * s.y * s.y) return refute("norm-equation");
        if (s.m != N + 1 - s.x && s.m != N + 1 + s.x) return refute("order relation");
    }
    if (s.m != s.k * s.q || s.k < 1) return refute("order factorization");
    if (!exceeds_ecpp_bound(s.q, N)) return refute("bound clause: q <= (N^(1/4) + 1)^2");
    auto full = scalar_mul(s.m, s.P, s.E);
    if (failed(full)) return refute("k q P undefined", std::get<AddFailure>(full).factor);
    if (!point_of(full).inf) return refute("k q P is not the identity");
    auto part = scalar_mul(s.k, s.P, s.E);
    if (failed(part)) return refute("k P undefined", std::get<AddFailure>(part).factor);
    if (point_of(part).inf) return refute("k P is the identity");
    EcppCheck ok;
    ok.verified = true;
    return ok;
}

EcppCheck ecpp_check(const EcppCertificate& cert) {
    mpz_class cur = cert.N;
    for (std::size_t i = 0; i < cert.steps.size(); ++i) {
        const auto& s = cert.steps[i];
        if (s.N != cur) {
            auto c = refute("chain link mismatch");
            c.failed_step = i;
            return c;
        }
        auto c = ecpp_check_step(s);
        if (!c.verified) {
            c.failed_step = i;
            return c;
        }
        cur = s.q;
    }
    if (cur >= kTrialDivisionFloor) {
        auto c = refute("chain ends above the trial-division floor");
        c.failed_step = cert.steps.size();
        return c;
    }
    if (!is_prime_trial(cur)) {
        auto c = refute("final subject is not prime by trial division");
        c.failed_step = cert.steps.size();
        return c;
    }
    EcppCheck ok;
    ok.verified = true;
    return ok;
}

std::optional<std::pair<mpz_class, mpz_class>> easy_split(const mpz_class& m, const mpz_class& N) {
    if (m <= 1) return std::nullopt;
    static const auto small = primes_up_to(10000);
    mpz_class k = 1, q = m;
    for (auto p : small) {
        if (mpz_class(p) * p > q) {
            // what is left is 1 or prime
            break;
        }
        while (mpz_divisible_ui_p(q.get_mpz_t(), p) && q != p) {
            q /= p;
            k *= p;
        }
    }
    if (q <= 1 || q == N) return std::nullopt;
    if (!exceeds_ecpp_bound(q, N)) return std::nullopt;
    if (q < kTrialDivisionFloor) {
        if (!is_prime_trial(q)) return std::nullopt;
    } else if (!rabin_miller_fixed(q).probable_prime || !rabin_miller(q, 10, 1).probable_prime) {
        return std::nullopt;
    }
    return std::make_pair(k, q);
}

const ClassPolynomial& cached_class_polynomial(std::int64_t D, unsigned max_attempts) {
    static std::mutex mu;
    static std::map<std::int64_t, ClassPolynomial> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(D);
    if (it == cache.end()) it = cache.emplace(D, hilbert_analytic(D, 0, max_attempts)).first;
    return it->second;
}

OrComposite<std::optional<std::pair<Curve, Point>>> cm_curve_with_order(const mpz_class& N, const ClassPolynomial& H,
                                                                        const mpz_class& m, const mpz_class& k,
                                                                        std::uint64_t seed) {
    using Result = std::optional<std::pair<Curve, Point>>;
    try {
        RootResult rr = root_mod(H, N);
        gmp_randclass rng(gmp_randinit_mt);
        rng.seed(static_cast<unsigned long>(seed) * 7919 + 17);
        std::vector<mpz_class> roots = rr.all;
        if (rr.root) {
            // preferred root first
            std::erase(roots, *rr.root);
            roots.insert(roots.begin(), *rr.root);
        }
        for (const auto& r : roots) {
            auto base = curve_from_j(r, N);
            if (is_composite(base)) return std::get<CompositeSignal>(base);
            const Curve& E = std::get<Curve>(base);
            std::vector<Curve> family;
            if (E.a == 0 || E.b == 0) family = higher_twists(E).curves;
            else family = {E, canonical_twist(E)};
            for (const auto& C : family) {
                for (int tries = 0; tries < 6; ++tries) {
                    auto P = random_point(C, rng);
                    if (is_composite(P)) return std::get<CompositeSignal>(P);
                    const Point& pt = std::get<Point>(P);
                    auto full = scalar_mul(m, pt, C);
                    if (failed(full)) return CompositeSignal{std::get<AddFailure>(full).factor, "m P undefined"};
                    if (!point_of(full).inf) break;  // wrong twist
                    auto part = scalar_mul(k, pt, C);
                    if (failed(part)) return CompositeSignal{std::get<AddFailure>(part).factor, "k P undefined"};
                    if (!point_of(part).inf) return Result{std::make_pair(C, pt)};
                }
            }
        }
        return Result{};
    } catch (const CompositeDetected& e) {
        return e.signal;
    }
}

OrComposite<std::optional<EcppStep>> ecpp_step_from_witness(const mpz_class& N, std::int64_t D, const mpz_class& x,
                                                            const mpz_class& y, std::uint64_t seed) {
    using Result = std::optional<EcppStep>;
    if (4 * N != x * x + mpz_class(static_cast<long>(-D)) * y * y)
        throw DomainError("ecpp_step_from_witness: 4N != x^2 + |D| y^2");
    for (const mpz_class& m : {mpz_class(N + 1 + x), mpz_class(N + 1 - x)}) {
        auto split = easy_split(m, N);
        if (!split) continue;
        auto found = cm_curve_with_order(N, cached_class_polynomial(D), m, split->first, seed);
        if (is_composite(found)) return std::get<CompositeSignal>(found);
        auto& cp = std::get<std::optional<std::pair<Curve, Point>>>(found);
        if (!cp) continue;
        EcppStep s;
        s.N = N;
        s.D = D;
        s.x = x;
        s.y = y;
        s.m = m;
        s.k = split->first;
        s.q = split->second;
        s.E = cp->first;
        s.P = cp->second;
        return Result{s};
    }
    return Result{};
}

namespace {

const std::vector<std::int64_t>& ecpp_discriminants() {
    static const std::vector<std::int64_t> list = [] {
        std::vector<std::int64_t> out;
        for (std::int64_t D = -3; D >= -1500; --D)
            if (is_fundamental(D) && class_number(D) <= 10) out.push_back(D);
        return out;
    }();
    return list;
}

OrComposite<std::optional<EcppStep>> descend_once(const mpz_class& N, std::uint64_t seed) {
    using Result = std::optional<EcppStep>;
    for (std::int64_t D : ecpp_discriminants()) {
        mpz_class Dz(static_cast<long>(D));
        if (kronecker(Dz, N) != 1) continue;
        mpz_class r;
        try {
            auto s = sqrt_mod(mod(Dz, N), N);
            if (is_composite(s)) return std::get<CompositeSignal>(s);
            r = std::get<mpz_class>(s);
        } catch (const NotASquare&) {
            return CompositeSignal{0, "Jacobi symbol +1 on a non-residue"};
        }
        if (mod(r * r - Dz, N) != 0) return CompositeSignal{0, "square root check failed"};
        auto xy = cornacchia_4n(Dz, N, r);
        if (!xy) continue;
        auto step = ecpp_step_from_witness(N, D, xy->first, xy->second, seed);
        if (is_composite(step)) return step;
        auto& s = std::get<Result>(step);
        if (s && s->q < N) return step;
    }
    return Result{};
}

}  // namespace

OrComposite<std::optional<EcppCertificate>> ecpp_prove(const mpz_class& N, std::uint64_t seed) {
    using Result = std::optional<EcppCertificate>;
    EcppCertificate cert;
    cert.N = N;
    mpz_class cur = N;
    while (cur >= kTrialDivisionFloor) {
        if (!rabin_miller_fixed(cur).probable_prime) return CompositeSignal{0, "Rabin-Miller witness for " + cur.get_str()};
        auto step = descend_once(cur, seed);
        if (is_composite(step)) return std::get<CompositeSignal>(step);
        auto& s = std::get<std::optional<EcppStep>>(step);
        if (!s) return Result{};
        cert.steps.push_back(*s);
        cur = s->q;
    }
    if (!is_prime_trial(cur)) {
        mpz_class d = 2;
        while (cur % d != 0) ++d;
        return CompositeSignal{cur == N ? d : mpz_class(0), cur.get_str() + " is composite"};
    }
    return Result{cert};
}

std::int64_t exceptional_field_discriminant(std::int64_t d, unsigned long q) {
    switch (d) {
        case -1: return -4;
        case -2: return -8;
        case -3: return -3;
        case -7: return -7;
        default: break;
    }
    if (d != -static_cast<std::int64_t>(q)) throw DomainError("exceptional_field_discriminant: unexpected d");
    return q % 4 == 3 ? -static_cast<std::int64_t>(q) : -4 * static_cast<std::int64_t>(q);
}

namespace {

// (d | f_q) with odd prime |d| routed through the Pisano shortcut and reciprocity
int exceptional_symbol(std::int64_t d, const FibContext& ctx) {
    const mpz_class& f = ctx.f_q;
    std::uint64_t ell = static_cast<std::uint64_t>(-d);
    if (ell < 3 || !is_prime_u64(ell)) return jacobi(mpz_class(static_cast<long>(d)), f);
    if (mpz_divisible_ui_p(f.get_mpz_t(), ell)) return 0;
    int minus_one = jacobi(mpz_class(-1), f);
    int sign = ((ell % 4 == 3) && (f % 4 == 3)) ? -1 : 1;
    return minus_one * sign * legendre_fib(ell, ctx);
}

}  // namespace

ExceptionalReport exceptional_cases_test(const FibContext& ctx, std::uint64_t seed) {
    ExceptionalReport rep;
    const mpz_class& f = ctx.f_q;
    const std::int64_t q = static_cast<std::int64_t>(ctx.q);
    std::vector<std::int64_t> ds{-1, -2, -3, -7, -q};
    if (q == 7) ds.pop_back();  // -q repeats -7
    for (std::int64_t d : ds) {
        ExceptionalBranch br;
        br.d = d;
        br.D = exceptional_field_discriminant(d, ctx.q);
        br.symbol = exceptional_symbol(d, ctx);
        auto finish = [&](std::string outcome) {
            br.outcome = std::move(outcome);
            rep.branches.push_back(br);
        };
        if (br.symbol != 1) {
            finish("symbol " + std::to_string(br.symbol));
            continue;
        }
        mpz_class x, y;
        if (d == -1) {
            x = 2 * fib((ctx.q + 1) / 2);
            y = fib((ctx.q - 1) / 2);
        } else {
            mpz_class Dz(static_cast<long>(br.D));
            auto s = sqrt_mod(mod(Dz, f), f);
            if (is_composite(s)) {
                rep.signal = std::get<CompositeSignal>(s);
                rep.verdict = ExceptionalVerdict::Composite;
                finish("square root exposed compositeness");
                return rep;
            }
            auto xy = cornacchia_4n(Dz, f, std::get<mpz_class>(s));
            if (!xy) {
                finish("no solution of 4 f_q = x^2 + |D| y^2");
                continue;
            }
            x = xy->first;
            y = xy->second;
        }
        mpz_class Dabs(static_cast<long>(-br.D));
        if (4 * f != x * x + Dabs * y * y) throw InternalError("exceptional_cases_test: norm equation");
        RootResult rr = root_mod(cached_class_polynomial(br.D), f);
        if (rr.all.empty()) {
            rep.verdict = ExceptionalVerdict::Composite;
            rep.signal = CompositeSignal{0, "H_D has no root mod f_q although f_q splits"};
            finish("no root of H_D");
            return rep;
        }
        auto step = ecpp_step_from_witness(f, br.D, x, y, seed);
        if (is_composite(step)) {
            rep.signal = std::get<CompositeSignal>(step);
            rep.verdict = ExceptionalVerdict::Composite;
            finish("ECPP exposed compositeness");
            return rep;
        }
        auto& s = std::get<std::optional<EcppStep>>(step);
        if (!s) {
            finish("x = " + x.get_str() + ": neither f_q + 1 +- x splits easily");
            continue;
        }
        auto chain = ecpp_prove(s->q, seed);
        if (is_composite(chain) || !std::get<std::optional<EcppCertificate>>(chain)) {
            finish("cofactor " + s->q.get_str() + " not proven");
            continue;
        }
        EcppCertificate cert;
        cert.N = f;
        cert.steps.push_back(*s);
        for (auto& st : std::get<std::optional<EcppCertificate>>(chain)->steps) cert.steps.push_back(st);
        auto check = ecpp_check(cert);
        if (!check.verified) {
            finish("certificate rejected: " + check.reason);
            continue;
        }
        finish("proved with m = " + s->m.get_str());
        rep.certificate = cert;
        rep.verdict = ExceptionalVerdict::Prime;
        return rep;
    }
    return rep;
}

}  // namespace fibcurve
