#pragma once

#include "fibcurve/modpoly.hpp"
#include "fibcurve/qforms.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibcurve {

struct RoundingUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VolcanoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ClassPolyMethod { Analytic, Crt };
std::string to_string(ClassPolyMethod m);

struct ClassPolynomial {
    std::int64_t D = 0;
    std::vector<mpz_class> coeffs;  // low degree first, monic
    ClassPolyMethod method = ClassPolyMethod::Analytic;
    mpz_class modulus = 0;          // 0 for integer coefficients
    unsigned precision_digits = 0;  // analytic only
    double max_residue = 0;         // analytic only
    std::size_t plan_primes_used = 0;  // crt only

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    ClassPolynomial reduce_mod(const mpz_class& p) const;
};

struct JApprox {
    mpz_class nearest;   // real part rounded
    double residue = 0;  // |re - nearest| + |im|
    std::string re, im;  // decimal expansions
};

// j(tau) for tau = (-b + sqrt(D)) / (2a) of a positive definite form.
JApprox j_at_form(const QuadForm& f, unsigned digits);
// tau given by decimal strings; Im(tau) must be at least about sqrt(3)/2.
JApprox j_from_tau(const std::string& re, const std::string& im, unsigned digits);

unsigned analytic_precision(std::int64_t D);

// digits = 0 selects the default policy: up to max_attempts rounds, doubling the
// precision while the rounding is unstable.
ClassPolynomial hilbert_analytic(std::int64_t D, unsigned digits = 0, unsigned max_attempts = 5);

struct PlanPrime {
    std::uint64_t eta = 0;
    std::int64_t t = 0;
    std::int64_t v = 0;
};

struct CrtPlan {
    std::int64_t D = 0;
    std::uint64_t h = 0;
    std::vector<PlanPrime> primes;
    double log_bound = 0;  // natural log of the coefficient bound B
    std::vector<PlanPrime> reserve;  // further candidates, used as replacements
};

// Natural log of a bound on |coefficients| of H_D.
double coefficient_log_bound(std::int64_t D);

// Primes eta <= max_eta with 4 eta = t^2 + v^2 |D|, t > 0, v squarefree over
// the given levels (v = 1 allowed), ascending in eta.
std::vector<PlanPrime> plan_candidates(std::int64_t D, const std::vector<unsigned>& levels,
                                       std::uint64_t max_eta = 1'000'000);

CrtPlan build_crt_plan(std::int64_t D, const std::vector<unsigned>& levels = {2, 3, 5, 7});

// j-invariant (not 0 or 1728) of a curve over F_eta with trace t or -t.
// Small eta: exhaustive scan from a seed-dependent start (j = 1 for seed 0).
// Otherwise a seeded random search.
std::optional<std::uint64_t> ell_t_curve_sample(std::uint64_t eta, std::int64_t t, std::uint64_t seed = 0);

// Exact #E(F_eta) for y^2 = x^3 + a x + b by summing Legendre symbols.
std::uint64_t count_points_small(std::uint64_t eta, std::uint64_t a, std::uint64_t b);
// A curve (a, b) over F_eta with the given j-invariant, j != 0, 1728.
std::pair<std::uint64_t, std::uint64_t> curve_with_j_small(std::uint64_t eta, std::uint64_t j);

// All j-invariants reachable from j0 through rational roots of Phi_l(X, j) for
// the usable table levels; must be the full surface orbit of size h(D).
std::vector<std::uint64_t> volcano_surface_walk(std::uint64_t j0, const PlanPrime& pp, std::int64_t D,
                                                const ModularPolynomialSet& tables);

struct CrtStats {
    std::size_t primes_used = 0;
    std::size_t primes_replaced = 0;
};

ClassPolynomial hilbert_crt_integer(std::int64_t D, const ModularPolynomialSet& tables, CrtStats* stats = nullptr);
ClassPolynomial hilbert_crt(std::int64_t D, const mpz_class& p, const ModularPolynomialSet& tables);

struct RootResult {
    std::optional<mpz_class> root;  // preferred root, avoiding 0 and 1728 when possible
    bool special_only = false;      // every root is 0 or 1728
    std::vector<mpz_class> all;
};

RootResult root_mod(const ClassPolynomial& H, const mpz_class& p);

}  // namespace fibcurve
