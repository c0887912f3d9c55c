#pragma once

#include "fibcurve/fibonacci.hpp"
#include "fibcurve/numeric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fibcurve {

struct QuadForm {
    std::int64_t a = 1, b = 0, c = 0;

    std::int64_t disc() const;
    bool operator==(const QuadForm&) const = default;
    auto operator<=>(const QuadForm&) const = default;
};

std::string to_string(const QuadForm& f);

bool is_reduced(const QuadForm& f);
bool is_primitive(const QuadForm& f);
QuadForm reduce(QuadForm f);
QuadForm principal_form(std::int64_t D);
QuadForm inverse(const QuadForm& f);  // reduced (a, -b, c)
QuadForm compose(const QuadForm& f, const QuadForm& g);
QuadForm power(const QuadForm& f, std::uint64_t k);
std::uint64_t form_order(const QuadForm& f);

bool is_discriminant(std::int64_t D);
bool is_fundamental(std::int64_t D);

struct Discriminant {
    std::int64_t D = 0;
    bool fundamental = false;
    bool good = false;  // D = 5 mod 8 and D = -l or -l1*l2 for distinct odd primes
};

Discriminant classify_discriminant(std::int64_t D);

constexpr std::int64_t kEnumerationBound = 10'000'000;

// All reduced primitive forms, ordered by (a, b). ResourceError past the bound.
std::vector<QuadForm> reduced_forms(std::int64_t D);
std::uint64_t class_number(std::int64_t D);

std::uint64_t bound_B(double absD);

struct PrimeForm {
    QuadForm form;
    std::int64_t b_ell = 0;
};

std::vector<PrimeForm> prime_forms(std::int64_t D, std::uint64_t bound);

double ggz_lower_bound(std::int64_t D);

// Classes of order exactly 2.
std::uint64_t genus_order2_census(std::int64_t D);
std::uint64_t two_sylow_order(std::int64_t D);

// Size of the subgroup of C(D) generated by the given forms.
std::uint64_t subgroup_order(std::int64_t D, const std::vector<QuadForm>& gens);

enum class ShanksVerdict { ProbablePrime, LikelyComposite, Composite };
std::string to_string(ShanksVerdict v);

struct ShanksReport {
    std::int64_t D = 0;
    std::uint64_t h = 0;
    std::uint64_t odd_part = 0;
    std::uint64_t bound = 0;
    std::uint64_t prime_form_count = 0;
    double expected_prime_forms = 0;
    std::uint64_t nonresidue_trials = 0;
    std::vector<QuadForm> order2;
    std::vector<std::int64_t> factors;  // nontrivial divisors of f_q exposed
    ShanksVerdict verdict = ShanksVerdict::ProbablePrime;
    std::vector<std::string> notes;
};

ShanksReport shanks_diagnostic(const FibContext& ctx, std::uint64_t h);

}  // namespace fibcurve
