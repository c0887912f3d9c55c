#pragma once

#include "fibcurve/curve.hpp"
#include "fibcurve/modpoly.hpp"
#include "fibcurve/poly.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibcurve {

struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// f_0 .. f_n with psi_n = f_n for odd n and psi_n = 2y f_n for even n.
std::vector<Poly> division_polys(const Curve& E, unsigned n);
// psi_ell as a polynomial in x for odd ell.
Poly division_poly(const Curve& E, unsigned ell);

enum class TraceMethod { FullSchoof, Eigenvalue };
std::string to_string(TraceMethod m);

struct TraceWitness {
    unsigned ell = 0;
    unsigned t_ell = 0;  // in [0, ell)
    TraceMethod method = TraceMethod::FullSchoof;
};

// t mod ell from pi^2 + [p]P = [t] pi P on the ell-torsion; ell odd, ell != p.
TraceWitness schoof_trace_mod(const Curve& E, unsigned ell);
// t mod 2 from gcd(x^3 + ax + b, x^p - x).
unsigned trace_mod_two(const Curve& E);
// Full trace by CRT over small primes; p <= 10^8.
std::int64_t schoof_trace(const Curve& E);

// deg gcd(Phi_ell(X, j(E)), X^p - X)
int elkies_gcd_degree(const Curve& E, unsigned ell, const ModularPolynomialSet& tables);
bool is_elkies(const Curve& E, unsigned ell, const ModularPolynomialSet& tables);

struct KernelPolynomial {
    unsigned ell = 0;
    Poly F;  // monic, degree (ell - 1) / 2
};

// Every Frobenius-stable line of E[ell], as kernel polynomials.
std::vector<KernelPolynomial> kernel_polys(const Curve& E, unsigned ell);
// The first of those; VerificationFailure when there is none.
KernelPolynomial kernel_poly(const Curve& E, unsigned ell);

// c with pi(P) = [c]P on the line cut out by K, if any.
std::optional<unsigned> frobenius_eigenvalue(const Curve& E, const KernelPolynomial& K);
// True when some Frobenius-stable line has eigenvalue c mod ell.
bool eigenvalue_check(const Curve& E, unsigned ell, unsigned c);
// Frobenius acts on a kernel line as a root of X^2 - tX + p mod ell.
bool eigenvalue_verify(const Curve& E, unsigned ell, const mpz_class& t);

// Roots of X^2 - tX + p mod ell, ascending; empty when irreducible.
std::vector<unsigned> frobenius_roots(const mpz_class& t, const mpz_class& p, unsigned ell);

double verification_bound(const mpz_class& N);  // 2 log^2(4 log^2 N)

struct VerifyCandidate {
    Curve E;
    std::int64_t D = 0;
    mpz_class t;  // trace p + 1 - #E
    std::vector<unsigned> elkies;
    std::string method;  // filled by the eigenvalue pass
    unsigned method_ell = 0;
    std::vector<std::string> log;
};

std::vector<VerifyCandidate> elkies_verification_pass(std::vector<VerifyCandidate> cands,
                                                      const ModularPolynomialSet& tables);
std::vector<VerifyCandidate> eigenvalue_verification_pass(std::vector<VerifyCandidate> cands);

}  // namespace fibcurve
