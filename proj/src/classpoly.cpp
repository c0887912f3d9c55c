#include "fibcurve/classpoly.hpp"

#include "fibcurve/modarith.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <set>

namespace fibcurve {

namespace {

using Real = boost::multiprecision::mpfr_float;

struct Cx {
    Real re, im;
};

Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
Cx operator*(const Cx& a, const Cx& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Cx operator*(const Cx& a, const Real& s) { return {a.re * s, a.im * s}; }
Cx operator/(const Cx& a, const Cx& b) {
    Real den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits) : old_(Real::default_precision()) { Real::default_precision(digits); }
    ~PrecisionScope() { Real::default_precision(old_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned old_;
};

Real real_pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

mpz_class round_to_z(const Real& x) {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), x.backend().data(), MPFR_RNDN);
    return z;
}

Real from_z(const mpz_class& z) {
    Real r;
    mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return r;
}

// j = E4^3 / Delta at tau = x + i y
Cx j_value(const Real& x, const Real& y, unsigned digits) {
    const Real two_pi = 2 * real_pi();
    const Real r = exp(-two_pi * y);
    const Real ang = two_pi * x;
    const Cx q{r * cos(ang), r * sin(ang)};
    const Real eps = pow(Real(10), -static_cast<int>(digits) - 10);

    Cx e4{Real(1), Real(0)};
    Cx euler{Real(1), Real(0)};
    Cx qn = q;
    Real rn = r;
    // pentagonal exponents in increasing order with their signs
    std::map<std::uint64_t, int> pent;
    for (std::uint64_t k = 1; k < 4000; ++k) {
        int s = (k % 2 == 0) ? 1 : -1;
        pent[k * (3 * k - 1) / 2] = s;
        pent[k * (3 * k + 1) / 2] = s;
    }
    for (std::uint64_t n = 1;; ++n) {
        std::uint64_t sigma = 0;
        for (std::uint64_t d = 1; d * d <= n; ++d) {
            if (n % d) continue;
            sigma += d * d * d;
            std::uint64_t e = n / d;
            if (e != d) sigma += e * e * e;
        }
        e4 = e4 + qn * Real(240.0 * static_cast<double>(sigma));
        auto it = pent.find(n);
        if (it != pent.end()) euler = it->second > 0 ? euler + qn : euler - qn;
        Real bound = rn * 240 * pow(Real(static_cast<double>(n + 1)), 4);
        if (bound < eps) break;
        if (n > 100000) throw ResourceError("j evaluation: series does not converge at this precision");
        qn = qn * q;
        rn *= r;
    }
    Cx e2 = euler * euler;
    Cx e4p = e2 * e2;
    Cx e8 = e4p * e4p;
    Cx e24 = e8 * e8 * e8;
    Cx delta = q * e24;
    return (e4 * e4 * e4) / delta;
}

JApprox to_approx(const Cx& v, unsigned digits) {
    JApprox out;
    out.nearest = round_to_z(v.re);
    Real res = abs(v.re - from_z(out.nearest)) + abs(v.im);
    out.residue = static_cast<double>(res);
    out.re = v.re.str(digits);
    out.im = v.im.str(digits);
    return out;
}

}  // namespace

std::string to_string(ClassPolyMethod m) { return m == ClassPolyMethod::Analytic ? "analytic" : "crt"; }

ClassPolynomial ClassPolynomial::reduce_mod(const mpz_class& p) const {
    ClassPolynomial r = *this;
    r.modulus = p;
    for (auto& c : r.coeffs) c = mod(c, p);
    return r;
}

JApprox j_at_form(const QuadForm& f, unsigned digits) {
    std::int64_t D = f.disc();
    if (f.a <= 0 || D >= 0) throw DomainError("j_at_form: form must be positive definite");
    PrecisionScope scope(digits + 10);
    Real twoa = Real(2 * f.a);
    Real x = Real(-f.b) / twoa;
    Real y = sqrt(Real(-D)) / twoa;
    if (y < Real("0.866")) throw DomainError("j_at_form: Im(tau) below sqrt(3)/2; reduce the form first");
    return to_approx(j_value(x, y, digits), digits);
}

JApprox j_from_tau(const std::string& re, const std::string& im, unsigned digits) {
    PrecisionScope scope(digits + 10);
    Real x(re), y(im);
    if (y < Real("0.866")) throw DomainError("j_from_tau: Im(tau) must be at least sqrt(3)/2");
    return to_approx(j_value(x, y, digits), digits);
}

unsigned analytic_precision(std::int64_t D) {
    double s = 0;
    for (const auto& f : reduced_forms(D)) s += 1.0 / static_cast<double>(f.a);
    double v = M_PI * std::sqrt(static_cast<double>(-D)) * s / std::log(10.0);
    return 15 + static_cast<unsigned>(std::ceil(v));
}

ClassPolynomial hilbert_analytic(std::int64_t D, unsigned digits, unsigned max_attempts) {
    auto forms = reduced_forms(D);
    unsigned d = digits ? digits : analytic_precision(D);
    unsigned attempts = digits ? 1 : std::max(1u, max_attempts);
    for (unsigned attempt = 0; attempt < attempts; ++attempt, d *= 2) {
        PrecisionScope scope(d + 10);
        std::vector<Cx> P{Cx{Real(1), Real(0)}};
        for (const auto& f : forms) {
            Real twoa = Real(2 * f.a);
            Cx j = j_value(Real(-f.b) / twoa, sqrt(Real(-D)) / twoa, d);
            std::vector<Cx> next(P.size() + 1, Cx{Real(0), Real(0)});
            for (std::size_t i = 0; i < P.size(); ++i) {
                next[i + 1] = next[i + 1] + P[i];
                next[i] = next[i] - P[i] * j;
            }
            P = std::move(next);
        }
        ClassPolynomial out;
        out.D = D;
        out.method = ClassPolyMethod::Analytic;
        out.precision_digits = d;
        double worst = 0;
        for (const auto& c : P) {
            mpz_class z = round_to_z(c.re);
            double res = static_cast<double>(abs(c.re - from_z(z)) + abs(c.im));
            worst = std::max(worst, res);
            out.coeffs.push_back(z);
        }
        out.max_residue = worst;
        if (worst >= 0.01) continue;
        if (out.coeffs.back() != 1) throw InternalError("hilbert_analytic: result is not monic");
        if (D % 3 != 0 && !is_cube(out.coeffs.front()))
            throw InternalError("hilbert_analytic: constant term of H_D is not a cube");
        return out;
    }
    throw RoundingUnstable("hilbert_analytic: coefficients not within 0.01 of integers for D = " + std::to_string(D));
}

// ---------------------------------------------------------------------------
// small prime fields

namespace {

struct Fe {
    std::uint64_t p;
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % p; }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + p - b) % p; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return a * b % p; }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
        std::uint64_t r = 1 % p;
        a %= p;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    std::uint64_t inv(std::uint64_t a) const { return pow(a, p - 2); }
    bool is_square(std::uint64_t a) const { return a % p == 0 || pow(a, (p - 1) / 2) == 1; }
    std::uint64_t sqrt(std::uint64_t a) const {
        a %= p;
        if (a == 0) return 0;
        if (p % 4 == 3) return pow(a, (p + 1) / 4);
        std::uint64_t q = p - 1, s = 0;
        while (q % 2 == 0) {
            q /= 2;
            ++s;
        }
        std::uint64_t z = 2;
        while (is_square(z)) ++z;
        std::uint64_t m = s, c = pow(z, q), t = pow(a, q), r = pow(a, (q + 1) / 2);
        while (t != 1) {
            std::uint64_t i = 0, tt = t;
            while (tt != 1) {
                tt = mul(tt, tt);
                ++i;
            }
            std::uint64_t b = c;
            for (std::uint64_t k = 0; k + i + 1 < m; ++k) b = mul(b, b);
            m = i;
            c = mul(b, b);
            t = mul(t, c);
            r = mul(r, b);
        }
        return r;
    }
};

struct Jac {
    std::uint64_t X, Y, Z;  // Z == 0 is the point at infinity
};

struct SmallCurve {
    Fe F;
    std::uint64_t a, b;

    Jac dbl(const Jac& P) const {
        if (P.Z == 0 || P.Y == 0) return {1, 1, 0};
        std::uint64_t Y2 = F.mul(P.Y, P.Y);
        std::uint64_t S = F.mul(4, F.mul(P.X, Y2));
        std::uint64_t Z2 = F.mul(P.Z, P.Z);
        std::uint64_t M = F.add(F.mul(3, F.mul(P.X, P.X)), F.mul(a, F.mul(Z2, Z2)));
        std::uint64_t X3 = F.sub(F.mul(M, M), F.mul(2, S));
        std::uint64_t Y3 = F.sub(F.mul(M, F.sub(S, X3)), F.mul(8, F.mul(Y2, Y2)));
        std::uint64_t Z3 = F.mul(2, F.mul(P.Y, P.Z));
        return {X3, Y3, Z3};
    }

    Jac add(const Jac& P, const Jac& Q) const {
        if (P.Z == 0) return Q;
        if (Q.Z == 0) return P;
        std::uint64_t Z1s = F.mul(P.Z, P.Z), Z2s = F.mul(Q.Z, Q.Z);
        std::uint64_t U1 = F.mul(P.X, Z2s), U2 = F.mul(Q.X, Z1s);
        std::uint64_t S1 = F.mul(P.Y, F.mul(Z2s, Q.Z)), S2 = F.mul(Q.Y, F.mul(Z1s, P.Z));
        if (U1 == U2) {
            if (S1 != S2) return {1, 1, 0};
            return dbl(P);
        }
        std::uint64_t H = F.sub(U2, U1), R = F.sub(S2, S1);
        std::uint64_t H2 = F.mul(H, H), H3 = F.mul(H2, H);
        std::uint64_t X3 = F.sub(F.sub(F.mul(R, R), H3), F.mul(2, F.mul(U1, H2)));
        std::uint64_t Y3 = F.sub(F.mul(R, F.sub(F.mul(U1, H2), X3)), F.mul(S1, H3));
        std::uint64_t Z3 = F.mul(H, F.mul(P.Z, Q.Z));
        return {X3, Y3, Z3};
    }

    Jac scalar(std::uint64_t k, const Jac& P) const {
        Jac R{1, 1, 0};
        for (int i = 63; i >= 0; --i) {
            R = dbl(R);
            if ((k >> i) & 1) R = add(R, P);
        }
        return R;
    }

    std::optional<Jac> random_point(std::mt19937_64& rng) const {
        for (int tries = 0; tries < 64; ++tries) {
            std::uint64_t x = rng() % F.p;
            std::uint64_t rhs = F.add(F.add(F.mul(F.mul(x, x), x), F.mul(a, x)), b);
            if (rhs == 0) continue;
            if (!F.is_square(rhs)) continue;
            return Jac{x, F.sqrt(rhs), 1};
        }
        return std::nullopt;
    }
};

std::vector<std::uint64_t> small_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Given N P = O, true when the order of P pins #E = N inside the Hasse interval.
bool order_pins_count(const SmallCurve& E, const Jac& P, std::uint64_t N) {
    std::uint64_t ord = N;
    for (std::uint64_t r : small_factors(N)) {
        while (ord % r == 0 && E.scalar(ord / r, P).Z == 0) ord /= r;
    }
    return static_cast<double>(ord) * static_cast<double>(ord) > 16.0 * static_cast<double>(E.F.p);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t v : {a, b, c}) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xbf58476d1ce4e5b9ULL;
    }
    return h;
}

constexpr std::uint64_t kExhaustiveSampleLimit = 2000;

}  // namespace

std::uint64_t count_points_small(std::uint64_t eta, std::uint64_t a, std::uint64_t b) {
    if (eta < 5 || eta > (1ULL << 31)) throw DomainError("count_points_small: field size out of range");
    Fe F{eta};
    std::vector<signed char> chi(eta, -1);
    chi[0] = 0;
    for (std::uint64_t y = 1; y <= eta / 2; ++y) chi[F.mul(y, y)] = 1;
    std::int64_t n = static_cast<std::int64_t>(eta) + 1;
    for (std::uint64_t x = 0; x < eta; ++x) n += chi[F.add(F.add(F.mul(F.mul(x, x), x), F.mul(a % eta, x)), b % eta)];
    return static_cast<std::uint64_t>(n);
}

std::pair<std::uint64_t, std::uint64_t> curve_with_j_small(std::uint64_t eta, std::uint64_t j) {
    Fe F{eta};
    j %= eta;
    if (j == 0 || j == 1728 % eta) throw DomainError("curve_with_j_small: j must avoid 0 and 1728");
    std::uint64_t k = F.mul(j, F.inv(F.sub(1728 % eta, j)));
    return {F.mul(3, k), F.mul(2, k)};
}

std::optional<std::uint64_t> ell_t_curve_sample(std::uint64_t eta, std::int64_t t, std::uint64_t seed) {
    if (eta < 5 || eta > 1'000'000 || !is_prime_u64(eta)) throw DomainError("ell_t_curve_sample: eta must be a prime in [5, 10^6]");
    std::uint64_t at = static_cast<std::uint64_t>(std::llabs(t));
    if (at * at > 4 * eta) throw DomainError("ell_t_curve_sample: |t| exceeds the Hasse bound");
    const std::uint64_t N1 = eta + 1 - at, N2 = eta + 1 + at;
    const std::uint64_t j1728 = 1728 % eta;
    if (eta <= kExhaustiveSampleLimit) {
        // seed 0 scans upward from j = 1, other seeds start elsewhere on the cycle
        const std::uint64_t start = seed ? mix_seed(eta, at, seed) % (eta - 1) : 0;
        for (std::uint64_t i = 0; i + 1 < eta; ++i) {
            std::uint64_t j = 1 + (start + i) % (eta - 1);
            if (j == j1728) continue;
            auto [a, b] = curve_with_j_small(eta, j);
            std::uint64_t n = count_points_small(eta, a, b);
            if (n == N1 || n == N2) return j;
        }
        return std::nullopt;
    }
    std::mt19937_64 rng(mix_seed(eta, at, seed));
    const std::uint64_t max_attempts = 40 * eta;
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::uint64_t j = 1 + rng() % (eta - 1);
        if (j == j1728) continue;
        auto [a, b] = curve_with_j_small(eta, j);
        SmallCurve E{Fe{eta}, a, b};
        for (int pt = 0; pt < 4; ++pt) {
            auto P = E.random_point(rng);
            if (!P) break;
            bool hit = false;
            for (std::uint64_t N : {N1, N2}) {
                if (E.scalar(N, *P).Z != 0) continue;
                hit = true;
                if (order_pins_count(E, *P, N)) return j;
            }
            if (!hit) break;  // this curve has neither order
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CRT plan

double coefficient_log_bound(std::int64_t D) {
    auto forms = reduced_forms(D);
    const double s = M_PI * std::sqrt(static_cast<double>(-D));
    double lb = 0;
    const std::size_t h = forms.size();
    lb += std::lgamma(h + 1.0) - std::lgamma(h / 2 + 1.0) - std::lgamma(h - h / 2 + 1.0);
    for (const auto& f : forms) {
        double e = s / static_cast<double>(f.a);
        lb += e + std::log1p(2080.0 * std::exp(-e));
    }
    return lb;
}

std::vector<PlanPrime> plan_candidates(std::int64_t D, const std::vector<unsigned>& levels, std::uint64_t max_eta) {
    std::vector<std::int64_t> vs{1};
    for (unsigned l : levels) {
        std::size_t n = vs.size();
        for (std::size_t i = 0; i < n; ++i) vs.push_back(vs[i] * l);
    }
    std::sort(vs.begin(), vs.end());
    std::map<std::uint64_t, PlanPrime> best;
    const std::int64_t absD = -D;
    for (std::int64_t v : vs) {
        std::int64_t base = v * v * absD;
        if (base > static_cast<std::int64_t>(4 * max_eta)) continue;
        for (std::int64_t t = 1;; ++t) {
            std::int64_t val = t * t + base;
            if (val > static_cast<std::int64_t>(4 * max_eta)) break;
            if (val % 4 != 0) continue;
            std::uint64_t eta = static_cast<std::uint64_t>(val / 4);
            if (eta <= 3 || !is_prime_u64(eta)) continue;
            auto it = best.find(eta);
            if (it == best.end() || it->second.v > v) best[eta] = PlanPrime{eta, t, v};
        }
    }
    std::vector<PlanPrime> out;
    for (const auto& [eta, pp] : best) out.push_back(pp);
    return out;
}

CrtPlan build_crt_plan(std::int64_t D, const std::vector<unsigned>& levels) {
    if (-D > 10'000'000) throw ResourceError("build_crt_plan: |D| too large");
    CrtPlan plan;
    plan.D = D;
    plan.h = class_number(D);
    plan.log_bound = coefficient_log_bound(D);
    const double target = std::log(4.0) + plan.log_bound;
    double have = 0;
    for (const auto& pp : plan_candidates(D, levels)) {
        if (have <= target) {
            plan.primes.push_back(pp);
            have += std::log(static_cast<double>(pp.eta));
        } else {
            plan.reserve.push_back(pp);
        }
    }
    if (have <= target) throw ResourceError("build_crt_plan: not enough plan primes below 10^6");
    return plan;
}

// ---------------------------------------------------------------------------
// volcano walk

namespace {

std::vector<std::uint64_t> phi_roots(const ModularPolynomial& phi, std::uint64_t j, std::uint64_t eta) {
    PolyRing R{mpz_class(static_cast<unsigned long>(eta))};
    std::vector<std::uint64_t> out;
    for (const auto& r : R.roots(phi.eval_y(mpz_class(static_cast<unsigned long>(j)), R))) out.push_back(r.get_ui());
    return out;
}

std::uint64_t ascend(std::uint64_t j, const PlanPrime& pp, const ModularPolynomialSet& tables) {
    for (unsigned l : tables.levels()) {
        if (pp.v % l != 0) continue;
        auto roots = phi_roots(tables.get(l), j, pp.eta);
        if (roots.empty()) throw VolcanoError("volcano: no rational l-isogeny from a sampled curve");
        if (roots.size() == 1) j = roots.front();
    }
    return j;
}

}  // namespace

std::vector<std::uint64_t> volcano_surface_walk(std::uint64_t j0, const PlanPrime& pp, std::int64_t D,
                                                const ModularPolynomialSet& tables) {
    const std::uint64_t h = class_number(D);
    std::vector<unsigned> walk_levels;
    for (unsigned l : tables.levels()) {
        if (l == pp.eta || pp.v % l == 0) continue;
        if (kronecker(mpz_class(static_cast<long>(D)), mpz_class(l)) == -1) continue;
        walk_levels.push_back(l);
    }
    std::set<std::uint64_t> seen;
    auto bfs = [&](std::uint64_t start) {
        std::vector<std::uint64_t> frontier{start};
        seen.insert(start);
        while (!frontier.empty()) {
            std::vector<std::uint64_t> next;
            for (std::uint64_t j : frontier)
                for (unsigned l : walk_levels)
                    for (std::uint64_t r : phi_roots(tables.get(l), j, pp.eta))
                        if (seen.insert(r).second) next.push_back(r);
            if (seen.size() > h) throw VolcanoError("volcano walk left the surface: orbit exceeds h(D)");
            frontier = std::move(next);
        }
    };
    bfs(pp.v > 1 ? ascend(j0, pp, tables) : j0);
    // the table primes may generate a proper subgroup; fill in by sampling Ell_t
    for (std::uint64_t s = 1; seen.size() < h && s <= 64 * h; ++s) {
        auto j = ell_t_curve_sample(pp.eta, pp.t, s);
        if (!j) continue;
        std::uint64_t top = pp.v > 1 ? ascend(*j, pp, tables) : *j;
        if (!seen.count(top)) bfs(top);
    }
    if (seen.size() != h)
        throw VolcanoError("volcano walk found " + std::to_string(seen.size()) + " of " + std::to_string(h) + " surface curves");
    return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// CRT assembly

namespace {

std::mutex crt_cache_mutex;
std::map<std::pair<std::int64_t, std::string>, ClassPolynomial> crt_cache;

std::string levels_key(const ModularPolynomialSet& tables) {
    std::string k;
    for (unsigned l : tables.levels()) k += std::to_string(l) + ",";
    return k;
}

}  // namespace

ClassPolynomial hilbert_crt_integer(std::int64_t D, const ModularPolynomialSet& tables, CrtStats* stats) {
    ClassPolynomial out;
    out.D = D;
    out.method = ClassPolyMethod::Crt;
    if (D == -3) {
        out.coeffs = {0, 1};
        return out;
    }
    if (D == -4) {
        out.coeffs = {-1728, 1};
        return out;
    }
    auto key = std::make_pair(D, levels_key(tables));
    {
        std::lock_guard<std::mutex> lock(crt_cache_mutex);
        auto it = crt_cache.find(key);
        if (it != crt_cache.end() && !stats) return it->second;
    }
    CrtPlan plan = build_crt_plan(D, tables.levels());
    std::vector<PlanPrime> queue = plan.primes;
    queue.insert(queue.end(), plan.reserve.begin(), plan.reserve.end());
    const double target = std::log(4.0) + plan.log_bound;
    CrtStats local_stats;

    mpz_class M = 1;
    std::vector<mpz_class> C(plan.h + 1, 0);
    double have = 0;
    for (const auto& pp : queue) {
        if (have > target) break;
        std::vector<std::uint64_t> orbit;
        try {
            auto j0 = ell_t_curve_sample(pp.eta, pp.t, 0);
            if (!j0) throw VolcanoError("no curve with the plan trace");
            orbit = volcano_surface_walk(*j0, pp, D, tables);
        } catch (const VolcanoError&) {
            ++local_stats.primes_replaced;
            continue;
        }
        mpz_class eta(static_cast<unsigned long>(pp.eta));
        PolyRing R(eta);
        Poly local = R.constant(1);
        for (std::uint64_t j : orbit) local = R.mul(local, R.x_minus(mpz_class(static_cast<unsigned long>(j))));
        mpz_class Minv = *invmod(M % eta, eta);
        for (std::size_t k = 0; k <= plan.h; ++k) {
            mpz_class delta = mod((local.coeff(k) - C[k]) * Minv, eta);
            C[k] += M * delta;
        }
        M *= eta;
        have += std::log(static_cast<double>(pp.eta));
        ++local_stats.primes_used;
    }
    if (have <= target) throw ResourceError("hilbert_crt: ran out of usable plan primes");
    mpz_class half = M / 2;
    mpz_class bound;
    mpz_class e;
    // |coefficient| must stay below the analytic bound B
    double lb = plan.log_bound / std::log(2.0);
    mpz_ui_pow_ui(bound.get_mpz_t(), 2, static_cast<unsigned long>(std::ceil(lb)) + 1);
    for (auto& c : C) {
        if (c > half) c -= M;
        if (abs(c) > bound) throw InternalError("hilbert_crt: coefficient exceeds the CRT bound");
    }
    if (C.back() != 1) throw InternalError("hilbert_crt: result is not monic");
    out.coeffs = C;
    out.plan_primes_used = local_stats.primes_used;
    if (stats) *stats = local_stats;
    std::lock_guard<std::mutex> lock(crt_cache_mutex);
    crt_cache[key] = out;
    return out;
}

ClassPolynomial hilbert_crt(std::int64_t D, const mpz_class& p, const ModularPolynomialSet& tables) {
    return hilbert_crt_integer(D, tables).reduce_mod(p);
}

RootResult root_mod(const ClassPolynomial& H, const mpz_class& p) {
    PolyRing R(p);
    Poly f = R.make(H.coeffs);
    RootResult out;
    if (f.deg() < 1) return out;
    out.all = R.roots(f);
    mpz_class j1728 = mod(mpz_class(1728), p);
    for (const auto& r : out.all) {
        if (r != 0 && r != j1728) {
            out.root = r;
            return out;
        }
    }
    if (!out.all.empty()) {
        out.special_only = true;
        out.root = out.all.front();
    }
    return out;
}

}  // namespace fibcurve
