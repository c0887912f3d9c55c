#pragma once

#include "fibcurve/modarith.hpp"
#include "fibcurve/primality.hpp"
#include "fibcurve/schoof.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fibcurve {

struct Config {
    double initial_bound = 0;           // 0 selects max(2 ln f_q, 30)
    double bound_cap = 256;
    std::uint64_t seed = 0;
    unsigned max_precision_attempts = 5;
    std::string table_dir = default_table_dir();
    unsigned rabin_miller_rounds = 20;
    std::uint64_t exhaustive_limit = 1'000'000;   // order evidence by full count up to this p
    std::uint64_t bsgs_limit = 10'000'000'000'000ULL;
    unsigned max_iterations = 400;      // discriminant attempts before giving up
};

// key = value lines; '#' starts a comment. Unknown keys throw DomainError.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string canonical_config(const Config& c);
std::string config_hash(const Config& c);  // 16 hex digits, FNV-1a

// Odd primes l <= bound with (f_q | l) = 1.
std::vector<std::uint32_t> build_P_q(const FibContext& ctx, double bound);

struct DiscriminantList {
    std::vector<std::int64_t> S;
    std::vector<std::uint32_t> P;
    double bound = 0;
};

// -l and -l_m l_k (m < k) that are 5 mod 8, ordered by k with singles first.
DiscriminantList good_discriminants(const std::vector<std::uint32_t>& P, double bound = 0);

enum class Stage { Sqrt, Cornacchia, PNotPrime, NoRoot, WrongOrder, Success };
std::string to_string(Stage s);

// Square roots mod f_q of -1 and of the primes in P_q, filled lazily.
struct SqrtCache {
    mpz_class f;
    std::optional<SqrtTable> table;
    mpz_class sqrt_minus_one;
    std::map<std::uint32_t, mpz_class> roots;
};

// sqrt(D) mod f_q as sqrt(-1) times the cached prime roots.
OrComposite<mpz_class> discriminant_sqrt(std::int64_t D, SqrtCache& cache);

struct Candidate {
    Curve E;
    Point P;
    mpz_class p;
    std::int64_t D = 0;
    mpz_class x, y;
    mpz_class t;             // p + 1 - f_q
    std::string family;      // "base", "twist" or "twist-<i>"
    bool special_j = false;
};

struct PAttempt {
    mpz_class p;
    int sign = -1;           // p = f_q + 1 + sign * x
    std::string ecpp;        // outcome of the ECPP branch on f_q
    std::optional<bool> rabin_miller;
    Stage stage = Stage::PNotPrime;
    std::string note;
};

struct Attempt {
    std::int64_t D = 0;
    Stage stage = Stage::Sqrt;
    mpz_class x, y;
    std::vector<PAttempt> ps;
    std::optional<Candidate> candidate;
    std::optional<EcppCertificate> ecpp;  // f_q proved on this discriminant
    std::string first_success;            // "ecpp" or "rabin-miller"
};

// One pass of the discriminant loop. Composite evidence about f_q is thrown
// as CompositeDetected; failures concerning p are recorded in the attempt.
Attempt attempt_discriminant(const FibContext& ctx, std::int64_t D, SqrtCache& cache, const Config& cfg,
                             const ModularPolynomialSet& tables, bool want_ecpp = true);

enum class Verdict { Constructed, Prime, Composite, Inconclusive };
std::string to_string(Verdict v);

struct PipelineResult {
    Verdict verdict = Verdict::Inconclusive;
    std::string failing_stage;
    std::optional<CompositeSignal> signal;
    std::optional<Candidate> chosen;
    std::size_t iterations = 0;
    std::size_t final_S_size = 0;
    nlohmann::json certificate;
};

PipelineResult construct(unsigned long q, const Config& cfg = Config{});

// Primality stages only: density, square-root precomputation, Cassini root,
// exceptional cases, then a full ECPP attempt.
PipelineResult check_primality(unsigned long q, const Config& cfg = Config{});

}  // namespace fibcurve
