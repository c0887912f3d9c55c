#pragma once

#include "fibcurve/classpoly.hpp"
#include "fibcurve/curve.hpp"
#include "fibcurve/fibonacci.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fibcurve {

enum class DensityVerdict { Plausible, Suspicious };
std::string to_string(DensityVerdict v);

struct DensityReport {
    mpz_class N;
    double scan_bound = 0;                  // 2 ln^2 N
    std::vector<std::uint32_t> scanned;     // primes <= scan_bound
    std::vector<std::uint32_t> residues;    // symbol +1
    std::optional<std::uint32_t> first_nonresidue;
    unsigned trials_to_nonresidue = 0;      // primes tried, capped at the trial limit
    double expected_residues = 0;           // half of the scanned primes
    DensityVerdict verdict = DensityVerdict::Plausible;
    std::vector<std::string> notes;

    static constexpr unsigned kTrialLimit = 50;
};

DensityReport density_test(const mpz_class& N);

struct RabinMillerResult {
    bool probable_prime = true;
    std::optional<mpz_class> witness;
    std::vector<mpz_class> bases;
};

// Seeded random bases in [2, N - 2].
RabinMillerResult rabin_miller(const mpz_class& N, unsigned witness_count = 20, std::uint64_t seed = 0);
// The twenty primes 2 .. 71 as bases; exact below 3.3e14.
RabinMillerResult rabin_miller_fixed(const mpz_class& N);

// q > (N^(1/4) + 1)^2, decided in exact integer arithmetic.
bool exceeds_ecpp_bound(const mpz_class& q, const mpz_class& N);

struct EcppStep {
    mpz_class N;
    std::int64_t D = 0;
    mpz_class x, y;     // 4N = x^2 + |D| y^2
    mpz_class m;        // N + 1 +- x, the curve order
    mpz_class k, q;     // m = k q
    Curve E;
    Point P;
};

// steps[i + 1].N == steps[i].q; the last q (or N itself when there are no
// steps) lies below the trial-division floor.
struct EcppCertificate {
    mpz_class N;
    std::vector<EcppStep> steps;
};

inline constexpr std::uint64_t kTrialDivisionFloor = 1'000'000;

struct EcppCheck {
    bool verified = false;
    std::string reason;          // first failing clause
    mpz_class factor = 0;        // exposed divisor, if any
    std::size_t failed_step = 0;
};

EcppCheck ecpp_check_step(const EcppStep& s);
EcppCheck ecpp_check(const EcppCertificate& cert);

// Splits m into k (factors below 10^4) and a probable-prime cofactor q beyond
// the ECPP bound for N; nullopt when m is not of that shape.
std::optional<std::pair<mpz_class, mpz_class>> easy_split(const mpz_class& m, const mpz_class& N);

// One ECPP step for N from a CM witness 4N = x^2 + |D| y^2, or nullopt when
// neither order splits easily or no suitable point turns up.
OrComposite<std::optional<EcppStep>> ecpp_step_from_witness(const mpz_class& N, std::int64_t D, const mpz_class& x,
                                                            const mpz_class& y, std::uint64_t seed = 0);

// Full chain down to the trial-division floor, searching small discriminants.
OrComposite<std::optional<EcppCertificate>> ecpp_prove(const mpz_class& N, std::uint64_t seed = 0);

enum class ExceptionalVerdict { Prime, Composite, ProbablePrime };
std::string to_string(ExceptionalVerdict v);

struct ExceptionalBranch {
    std::int64_t d = 0;
    std::int64_t D = 0;
    int symbol = 0;
    std::string outcome;
};

struct ExceptionalReport {
    ExceptionalVerdict verdict = ExceptionalVerdict::ProbablePrime;
    std::vector<ExceptionalBranch> branches;
    std::optional<EcppCertificate> certificate;
    std::optional<CompositeSignal> signal;
};

std::int64_t exceptional_field_discriminant(std::int64_t d, unsigned long q);
ExceptionalReport exceptional_cases_test(const FibContext& ctx, std::uint64_t seed = 0);

// A curve over Z/NZ with j a root of H mod N and a point P with m P = O and
// k P != O, trying quadratic and higher twists.
OrComposite<std::optional<std::pair<Curve, Point>>> cm_curve_with_order(const mpz_class& N, const ClassPolynomial& H,
                                                                        const mpz_class& m, const mpz_class& k,
                                                                        std::uint64_t seed);

// Integer H_D for small |D|, computed once per process.
const ClassPolynomial& cached_class_polynomial(std::int64_t D, unsigned max_attempts = 5);

}  // namespace fibcurve
