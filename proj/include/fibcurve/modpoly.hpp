#pragma once

#include "fibcurve/poly.hpp"

#include <map>
#include <string>
#include <vector>

namespace fibcurve {

// Classical modular polynomial Phi_l(X, Y), stored by monomial X^i Y^j with i >= j.
struct ModularPolynomial {
    unsigned ell = 0;
    std::map<std::pair<unsigned, unsigned>, mpz_class> coeffs;

    mpz_class coeff(unsigned i, unsigned j) const;  // symmetric lookup
    // Phi_l(X, y) reduced mod p as a polynomial in X
    Poly eval_y(const mpz_class& y, const PolyRing& R) const;
    // Phi_l(x, y) mod p
    mpz_class eval(const mpz_class& x, const mpz_class& y, const mpz_class& p) const;
};

// From the q-expansion of j via power sums over the l+1 isogenous lattices.
ModularPolynomial generate_modular_polynomial(unsigned ell);

std::string serialize_modular_polynomial(const ModularPolynomial& phi);
ModularPolynomial parse_modular_polynomial(const std::string& text);

// Throws InternalError unless Phi is symmetric, monic of degree l+1 in X and
// Phi(j(q^l), j(q)) vanishes through q^terms.
void validate_modular_polynomial(const ModularPolynomial& phi, long terms = 30);

// Reads <dir>/phi_<l>.txt and validates it.
ModularPolynomial load_modular_polynomial(const std::string& dir, unsigned ell);

std::string default_table_dir();

class ModularPolynomialSet {
public:
    explicit ModularPolynomialSet(const std::string& dir = default_table_dir(),
                                  std::vector<unsigned> levels = {2, 3, 5, 7});
    const ModularPolynomial& get(unsigned ell) const;
    bool has(unsigned ell) const { return tables_.count(ell) != 0; }
    std::vector<unsigned> levels() const;

private:
    std::map<unsigned, ModularPolynomial> tables_;
};

}  // namespace fibcurve
