#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fibcurve {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotASquare : DomainError {
    using DomainError::DomainError;
};

// A computation that only makes sense modulo a prime noticed that its modulus
// is not prime. `factor` is a nontrivial divisor when one was exposed, else 0.
struct CompositeSignal {
    mpz_class factor;
    std::string reason;
};

template <class T>
using OrComposite = std::variant<T, CompositeSignal>;

template <class T>
bool is_composite(const OrComposite<T>& r) {
    return std::holds_alternative<CompositeSignal>(r);
}

// Thrown when a CompositeSignal has to cross an API that has no room for it.
struct CompositeDetected : std::runtime_error {
    CompositeSignal signal;
    explicit CompositeDetected(CompositeSignal s)
        : std::runtime_error("modulus is composite: " + s.reason), signal(std::move(s)) {}
};

template <class T>
const T& value_or_throw(const OrComposite<T>& r) {
    if (auto* c = std::get_if<CompositeSignal>(&r)) throw CompositeDetected(*c);
    return std::get<T>(r);
}

mpz_class mod(const mpz_class& a, const mpz_class& m);
mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& m);
std::optional<mpz_class> invmod(const mpz_class& a, const mpz_class& m);
mpz_class isqrt(const mpz_class& n);
bool is_square(const mpz_class& n, mpz_class* root = nullptr);
mpz_class icbrt(const mpz_class& n);  // floor cube root for n >= 0
bool is_cube(const mpz_class& n);      // any sign
unsigned long bit_length(const mpz_class& n);
std::string dec(const mpz_class& n);
mpz_class parse_integer(const std::string& s);

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m);
std::int64_t floor_div(std::int64_t a, std::int64_t b);

std::vector<std::uint32_t> primes_up_to(std::uint32_t n);
bool is_prime_trial(const mpz_class& n);  // exact, meant for small n
bool is_prime_u64(std::uint64_t n);       // deterministic Miller-Rabin

// Distinct prime divisors of |n| by trial division; n must factor completely
// below `limit` apart from one leftover cofactor, returned via `rest`.
std::vector<mpz_class> prime_divisors(const mpz_class& n, std::uint64_t limit,
                                      mpz_class* rest = nullptr);

}  // namespace fibcurve
