#include "fibcurve/schoof.hpp"

#include "fibcurve/modarith.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fibcurve {

std::string to_string(TraceMethod m) { return m == TraceMethod::FullSchoof ? "full-schoof" : "eigenvalue"; }

std::vector<Poly> division_polys(const Curve& E, unsigned n) {
    PolyRing R(E.p);
    const mpz_class &a = E.a, &b = E.b;
    std::vector<Poly> f(std::max(n + 1, 5u));
    f[0] = Poly();
    f[1] = R.constant(1);
    f[2] = R.constant(1);
    f[3] = R.make({-a * a, 12 * b, 6 * a, 0, 3});
    f[4] = R.make({2 * (-8 * b * b - a * a * a), 2 * (-4 * a * b), 2 * (-5 * a * a), 2 * 20 * b, 2 * 5 * a, 0, 2});
    const Poly F = R.make({b, a, 0, 1});
    const Poly F2 = R.scale(R.sqr(F), 16);
    auto cube = [&](const Poly& x) { return R.mul(R.sqr(x), x); };
    for (unsigned k = 5; k <= n; ++k) {
        unsigned m = k / 2;
        if (k % 2) {
            Poly u = R.mul(f[m + 2], cube(f[m]));
            Poly v = R.mul(f[m - 1], cube(f[m + 1]));
            if (m % 2 == 0) u = R.mul(F2, u);
            else v = R.mul(F2, v);
            f[k] = R.sub(u, v);
        } else {
            Poly u = R.mul(f[m + 2], R.sqr(f[m - 1]));
            Poly v = R.mul(f[m - 2], R.sqr(f[m + 1]));
            f[k] = R.mul(f[m], R.sub(u, v));
        }
    }
    f.resize(n + 1);
    return f;
}

Poly division_poly(const Curve& E, unsigned ell) {
    if (ell % 2 == 0) throw DomainError("division_poly: ell must be odd");
    return division_polys(E, ell)[ell];
}

namespace {

// A modulus factor turned up while inverting; computation restarts on it.
struct Split {
    Poly factor;
};

// Points (X(x), Y(x) y) over F_p[x]/(g)
struct SymPoint {
    bool inf = false;
    Poly X, Y;
};

class SymCurve {
public:
    SymCurve(const Curve& E, Poly g) : E_(E), R_(E.p), g_(std::move(g)) {
        F_ = R_.rem(R_.make({E.b, E.a, 0, 1}), g_);
    }

    const PolyRing& ring() const { return R_; }
    const Poly& modulus() const { return g_; }
    const Poly& rhs() const { return F_; }

    Poly red(const Poly& a) const { return R_.rem(a, g_); }
    Poly mul(const Poly& a, const Poly& b) const { return R_.mulmod(a, b, g_); }

    Poly inv(const Poly& a) const {
        Poly r = red(a);
        Poly d = R_.gcd(r, g_);
        if (r.is_zero() || d.deg() == g_.deg()) throw InternalError("symbolic inverse of zero");
        if (d.deg() > 0) throw Split{d};
        return *R_.invmod(r, g_);
    }

    // zero, or a unit; splits otherwise
    bool is_zero(const Poly& a) const {
        Poly r = red(a);
        if (r.is_zero()) return true;
        Poly d = R_.gcd(r, g_);
        if (d.deg() > 0) throw Split{d};
        return false;
    }

    SymPoint dbl(const SymPoint& P) const {
        if (P.inf) return P;
        if (is_zero(P.Y)) return SymPoint{true, {}, {}};
        Poly num = R_.add(R_.scale(mul(P.X, P.X), 3), R_.constant(E_.a));
        Poly L = mul(num, inv(mul(R_.scale(P.Y, 2), F_)));
        Poly x3 = red(R_.sub(mul(mul(L, L), F_), R_.scale(P.X, 2)));
        Poly y3 = red(R_.sub(mul(L, R_.sub(P.X, x3)), P.Y));
        return SymPoint{false, x3, y3};
    }

    SymPoint add(const SymPoint& P, const SymPoint& Q) const {
        if (P.inf) return Q;
        if (Q.inf) return P;
        Poly dx = R_.sub(Q.X, P.X);
        if (is_zero(dx)) {
            if (is_zero(R_.add(P.Y, Q.Y))) return SymPoint{true, {}, {}};
            if (is_zero(R_.sub(P.Y, Q.Y))) return dbl(P);
            throw InternalError("symbolic addition: inconsistent points");
        }
        Poly L = mul(R_.sub(Q.Y, P.Y), inv(dx));
        Poly x3 = red(R_.sub(R_.sub(mul(mul(L, L), F_), P.X), Q.X));
        Poly y3 = red(R_.sub(mul(L, R_.sub(P.X, x3)), P.Y));
        return SymPoint{false, x3, y3};
    }

    SymPoint scalar(std::uint64_t k, const SymPoint& P) const {
        SymPoint acc{true, {}, {}};
        SymPoint base = P;
        while (k) {
            if (k & 1) acc = add(acc, base);
            k >>= 1;
            if (k) base = dbl(base);
        }
        return acc;
    }

    bool same(const SymPoint& P, const SymPoint& Q) const {
        if (P.inf || Q.inf) return P.inf == Q.inf;
        return is_zero(R_.sub(P.X, Q.X)) && is_zero(R_.sub(P.Y, Q.Y));
    }

    SymPoint frobenius(const SymPoint& P) const {
        if (P.inf) return P;
        const mpz_class& p = E_.p;
        Poly X = R_.powmod(P.X, p, g_);
        Poly Yp = R_.powmod(P.Y, p, g_);
        Poly Fh = R_.powmod(F_, (p - 1) / 2, g_);
        return SymPoint{false, X, mul(Yp, Fh)};
    }

private:
    Curve E_;
    PolyRing R_;
    Poly g_;
    Poly F_;
};

unsigned schoof_on(const Curve& E, unsigned ell, Poly g) {
    for (;;) {
        try {
            SymCurve S(E, g);
            const PolyRing& R = S.ring();
            SymPoint P{false, S.red(R.x()), R.constant(1)};
            SymPoint pi = S.frobenius(P);
            SymPoint pi2 = S.frobenius(pi);
            std::uint64_t pbar = mpz_class(E.p % ell).get_ui();
            SymPoint Q = S.add(pi2, S.scalar(pbar, P));
            if (Q.inf) return 0;
            SymPoint T = pi;
            for (unsigned tau = 1; tau <= (ell - 1) / 2; ++tau) {
                if (tau > 1) T = S.add(T, pi);
                if (T.inf) continue;
                if (S.is_zero(R.sub(T.X, Q.X))) {
                    if (S.is_zero(R.sub(T.Y, Q.Y))) return tau;
                    return ell - tau;
                }
            }
            throw InternalError("schoof: no trace candidate matched");
        } catch (const Split& s) {
            g = s.factor;
        }
    }
}

}  // namespace

TraceWitness schoof_trace_mod(const Curve& E, unsigned ell) {
    if (ell < 3 || ell % 2 == 0 || !is_prime_u64(ell)) throw DomainError("schoof_trace_mod: ell must be an odd prime");
    if (E.p == ell) throw DomainError("schoof_trace_mod: ell equals the characteristic");
    PolyRing R(E.p);
    Poly g = R.monic(division_poly(E, ell));
    return TraceWitness{ell, schoof_on(E, ell, g), TraceMethod::FullSchoof};
}

unsigned trace_mod_two(const Curve& E) {
    PolyRing R(E.p);
    Poly F = R.make({E.b, E.a, 0, 1});
    Poly xp = R.sub(R.powmod(R.x(), E.p, F), R.x());
    return R.gcd(F, xp).deg() > 0 ? 0 : 1;
}

std::int64_t schoof_trace(const Curve& E) {
    if (E.p > 100'000'000) throw ResourceError("schoof_trace: modulus above 10^8");
    mpz_class bound = 4 * isqrt(E.p) + 4;
    mpz_class M = 2, t = trace_mod_two(E);
    for (unsigned ell = 3; M <= bound; ell += 2) {
        if (!is_prime_u64(ell) || E.p == ell) continue;
        unsigned r = schoof_trace_mod(E, ell).t_ell;
        mpz_class k = mod((r - t) * *invmod(M % ell, mpz_class(ell)), mpz_class(ell));
        t += M * k;
        M *= ell;
    }
    if (t > M / 2) t -= M;
    if (t * t > 4 * E.p) throw InternalError("schoof_trace: result outside the Hasse interval");
    return t.get_si();
}

int elkies_gcd_degree(const Curve& E, unsigned ell, const ModularPolynomialSet& tables) {
    if (!tables.has(ell)) throw ResourceError("no modular polynomial table for level " + std::to_string(ell));
    PolyRing R(E.p);
    mpz_class j = value_or_throw(j_invariant(E));
    Poly phi = tables.get(ell).eval_y(j, R);
    if (phi.deg() < 1) return phi.is_zero() ? static_cast<int>(ell + 1) : 0;
    phi = R.monic(phi);
    Poly xp = R.sub(R.powmod(R.x(), E.p, phi), R.x());
    return R.gcd(phi, xp).deg();
}

bool is_elkies(const Curve& E, unsigned ell, const ModularPolynomialSet& tables) {
    return elkies_gcd_degree(E, ell, tables) > 0;
}

namespace {

// x([k]P) and y([k]P)/y as fractions evaluated mod g, via the f_n convention
std::pair<Poly, Poly> multiple_coords(const std::vector<Poly>& f, unsigned k, const Poly& Fx, const PolyRing& R,
                                      const Poly& g) {
    auto mulm = [&](const Poly& a, const Poly& b) { return R.mulmod(a, b, g); };
    auto invm = [&](const Poly& a) {
        auto r = R.invmod(R.rem(a, g), g);
        if (!r) throw Split{R.gcd(R.rem(a, g), g)};
        return *r;
    };
    Poly fk2 = mulm(f[k], f[k]);
    Poly X, Y;
    Poly F4 = R.scale(Fx, 4);
    if (k % 2 == 0) {
        X = R.sub(R.x(), mulm(mulm(f[k - 1], f[k + 1]), invm(mulm(F4, fk2))));
        Poly den = mulm(mulm(fk2, fk2), R.scale(mulm(Fx, Fx), 16));
        Y = mulm(f[2 * k], invm(den));
    } else {
        X = R.sub(R.x(), mulm(mulm(F4, mulm(f[k - 1], f[k + 1])), invm(fk2)));
        Y = mulm(f[2 * k], invm(mulm(fk2, fk2)));
    }
    return {R.rem(X, g), R.rem(Y, g)};
}

}  // namespace

std::vector<KernelPolynomial> kernel_polys(const Curve& E, unsigned ell) {
    if (ell < 3 || ell % 2 == 0) throw DomainError("kernel_polys: ell must be an odd prime");
    PolyRing R(E.p);
    auto f = division_polys(E, ell);
    Poly psi = R.monic(f[ell]);
    Poly Fx = R.make({E.b, E.a, 0, 1});
    const int want = static_cast<int>(ell - 1) / 2;
    auto factors = R.irreducible_factors(psi);
    std::set<std::vector<mpz_class>> seen;
    std::vector<KernelPolynomial> out;
    for (const auto& g : factors) {
        if (g.deg() > want) continue;
        // the line through a root of g: collect the factors hit by x([k]P)
        std::set<std::size_t> hit;
        for (unsigned k = 1; k <= ell / 2; ++k) {
            Poly xk = multiple_coords(f, k, Fx, R, g).first;
            for (std::size_t i = 0; i < factors.size(); ++i)
                if (R.compose_mod(factors[i], xk, g).is_zero()) hit.insert(i);
        }
        Poly F = R.constant(1);
        for (auto i : hit) F = R.mul(F, factors[i]);
        if (F.deg() != want) continue;
        if (seen.insert(F.c).second) out.push_back(KernelPolynomial{ell, F});
    }
    return out;
}

KernelPolynomial kernel_poly(const Curve& E, unsigned ell) {
    auto ks = kernel_polys(E, ell);
    if (ks.empty()) throw VerificationFailure("no Frobenius-stable line in E[" + std::to_string(ell) + "]");
    return ks.front();
}

std::optional<unsigned> frobenius_eigenvalue(const Curve& E, const KernelPolynomial& K) {
    PolyRing R(E.p);
    const unsigned ell = K.ell;
    auto f = division_polys(E, 2 * ell);
    Poly Fx = R.make({E.b, E.a, 0, 1});
    const Poly& g = K.F;
    Poly xp = R.powmod(R.x(), E.p, g);
    Poly yp = R.powmod(Fx, (E.p - 1) / 2, g);
    for (unsigned c = 1; c < ell; ++c) {
        auto [X, Y] = multiple_coords(f, c, Fx, R, g);
        if (R.sub(X, xp).is_zero() && R.sub(Y, yp).is_zero()) return c;
    }
    return std::nullopt;
}

bool eigenvalue_check(const Curve& E, unsigned ell, unsigned c) {
    c %= ell;
    for (const auto& K : kernel_polys(E, ell)) {
        auto ev = frobenius_eigenvalue(E, K);
        if (ev && *ev == c) return true;
    }
    return false;
}

std::vector<unsigned> frobenius_roots(const mpz_class& t, const mpz_class& p, unsigned ell) {
    std::vector<unsigned> out;
    for (unsigned x = 0; x < ell; ++x)
        if (mod(mpz_class(x) * x - t * x + p, mpz_class(ell)) == 0) out.push_back(x);
    return out;
}

bool eigenvalue_verify(const Curve& E, unsigned ell, const mpz_class& t) {
    auto roots = frobenius_roots(t, E.p, ell);
    if (roots.empty()) throw VerificationFailure("X^2 - tX + p is irreducible mod " + std::to_string(ell));
    auto ev = frobenius_eigenvalue(E, kernel_poly(E, ell));
    if (!ev) return false;
    return std::find(roots.begin(), roots.end(), *ev) != roots.end();
}

double verification_bound(const mpz_class& N) {
    double l = std::log(N.get_d());
    double inner = 4 * l * l;
    double li = std::log(inner);
    return 2 * li * li;
}

std::vector<VerifyCandidate> elkies_verification_pass(std::vector<VerifyCandidate> cands,
                                                      const ModularPolynomialSet& tables) {
    std::vector<VerifyCandidate> kept;
    for (auto& c : cands) {
        mpz_class j = value_or_throw(j_invariant(c.E));
        bool special = j == 0 || j == mod(mpz_class(1728), c.E.p);
        bool ok = true;
        c.elkies.clear();
        for (unsigned ell : tables.levels()) {
            if (c.E.p == ell) continue;
            int r = kronecker(mpz_class(static_cast<long>(c.D)), mpz_class(ell));
            // ell dividing the conductor of Z[pi] makes Frobenius degenerate mod ell
            if (r != 0 && kronecker(c.t * c.t - 4 * c.E.p, mpz_class(ell)) == 0) {
                r = 0;
                c.log.push_back("l=" + std::to_string(ell) + " divides the Frobenius conductor");
            }
            if (special) {
                c.log.push_back("l=" + std::to_string(ell) + " skipped (j special)");
                if (r != -1) c.elkies.push_back(ell);
                continue;
            }
            int d = elkies_gcd_degree(c.E, ell, tables);
            c.log.push_back("l=" + std::to_string(ell) + " r=" + std::to_string(r) + " d=" + std::to_string(d));
            if ((r != -1 && d == 0) || (r == -1 && d > 0)) {
                ok = false;
                c.log.push_back("removed at l=" + std::to_string(ell));
                break;
            }
            if (d > 0) c.elkies.push_back(ell);
        }
        if (ok) kept.push_back(std::move(c));
    }
    return kept;
}

std::vector<VerifyCandidate> eigenvalue_verification_pass(std::vector<VerifyCandidate> cands) {
    std::vector<VerifyCandidate> kept;
    for (auto& c : cands) {
        unsigned use = 0;
        for (unsigned ell : c.elkies)
            if (ell % 2 == 1 && mpz_class(ell) != c.E.p && !frobenius_roots(c.t, c.E.p, ell).empty()) {
                use = ell;
                break;
            }
        bool ok = true;
        try {
            if (use) {
                c.method = to_string(TraceMethod::Eigenvalue);
                c.method_ell = use;
                ok = eigenvalue_verify(c.E, use, c.t);
                c.log.push_back("eigenvalue l=" + std::to_string(use) + (ok ? " pass" : " fail"));
            } else {
                c.method = to_string(TraceMethod::FullSchoof);
                for (unsigned ell : {3u, 5u, 7u}) {
                    if (mpz_class(ell) == c.E.p) continue;
                    unsigned r = schoof_trace_mod(c.E, ell).t_ell;
                    bool match = mod(c.t, mpz_class(ell)) == r;
                    c.log.push_back("schoof l=" + std::to_string(ell) + " t_l=" + std::to_string(r) +
                                    (match ? " pass" : " fail"));
                    if (!match) {
                        ok = false;
                        break;
                    }
                }
            }
        } catch (const VerificationFailure& e) {
            ok = false;
            c.log.push_back(std::string("verification failure: ") + e.what());
        }
        if (ok) kept.push_back(std::move(c));
    }
    return kept;
}

}  // namespace fibcurve
