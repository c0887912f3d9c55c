#include "fibcurve/modpoly.hpp"

#include "fibcurve/qseries.hpp"

#include <fstream>
#include <sstream>

namespace fibcurve {

mpz_class ModularPolynomial::coeff(unsigned i, unsigned j) const {
    auto it = coeffs.find(i >= j ? std::make_pair(i, j) : std::make_pair(j, i));
    return it == coeffs.end() ? mpz_class(0) : it->second;
}

Poly ModularPolynomial::eval_y(const mpz_class& y, const PolyRing& R) const {
    const mpz_class& p = R.modulus();
    std::vector<mpz_class> ypow(ell + 2);
    ypow[0] = 1;
    for (unsigned k = 1; k < ypow.size(); ++k) ypow[k] = mod(ypow[k - 1] * y, p);
    std::vector<mpz_class> out(ell + 2, 0);
    for (const auto& [ij, v] : coeffs) {
        auto [i, j] = ij;
        out[i] += v * ypow[j];
        if (i != j) out[j] += v * ypow[i];
    }
    return R.make(std::move(out));
}

mpz_class ModularPolynomial::eval(const mpz_class& x, const mpz_class& y, const mpz_class& p) const {
    PolyRing R(p);
    return R.eval(eval_y(y, R), x);
}

ModularPolynomial generate_modular_polynomial(unsigned ell) {
    if (ell < 2 || !is_prime_u64(ell)) throw DomainError("generate_modular_polynomial: level must be prime");
    const long L = ell;
    const long margin = 8;
    const long T = L * (L + 1) + 1 + margin;  // precision of the power sums
    Laurent j = j_series(L * T + L + 4);

    std::vector<Laurent> jm(L + 2);
    jm[0] = laurent_constant(1, j.top);
    for (long m = 1; m <= L + 1; ++m) jm[m] = laurent_mul(jm[m - 1], j);

    std::vector<Laurent> ps(L + 2);
    for (long m = 1; m <= L + 1; ++m) {
        Laurent a = laurent_dilate(jm[m], L);
        a.set_top(T);
        // sum over the l conjugates of j(q^(1/l))^m keeps exponents divisible by l
        Laurent b;
        b.low = -(m / L) - 1;
        b.top = T;
        b.c.assign(b.top - b.low, 0);
        for (long n = b.low; n < b.top; ++n) {
            long src = n * L;
            if (src < jm[m].low) continue;
            if (src >= jm[m].top) throw InternalError("modular polynomial: j power precision too low");
            b.c[n - b.low] = jm[m].coeff(src) * L;
        }
        ps[m] = laurent_add(a, b);
    }

    std::vector<Laurent> e(L + 2);
    e[0] = laurent_constant(1, T);
    for (long m = 1; m <= L + 1; ++m) {
        Laurent acc;
        bool first = true;
        for (long i = 1; i <= m; ++i) {
            Laurent t = laurent_mul(e[m - i], ps[i]);
            if (i % 2 == 0) t = laurent_scale(t, -1);
            acc = first ? t : laurent_add(acc, t);
            first = false;
        }
        for (auto& v : acc.c) {
            if (!mpz_divisible_ui_p(v.get_mpz_t(), m)) throw InternalError("modular polynomial: Newton step not integral");
            v /= m;
        }
        e[m] = acc;
    }

    ModularPolynomial phi;
    phi.ell = ell;
    for (long m = 0; m <= L + 1; ++m) {
        Laurent s = e[m];
        if (s.top < 1) throw InternalError("modular polynomial: symmetric function precision too low");
        long pole = 0;
        for (long n = s.low; n < 0; ++n)
            if (s.coeff(n) != 0) {
                pole = -n;
                break;
            }
        if (pole > L + 1) throw InternalError("modular polynomial: pole order too large");
        std::vector<mpz_class> a(L + 2, 0);
        for (long k = pole; k >= 0; --k) {
            a[k] = s.coeff(-k);
            if (a[k] != 0) s = laurent_sub(s, laurent_scale(jm[k], a[k]));
        }
        for (long n = s.low; n < s.top; ++n)
            if (s.coeff(n) != 0) throw InternalError("modular polynomial: symmetric function is not a polynomial in j");
        unsigned i = static_cast<unsigned>(L + 1 - m);
        for (long k = 0; k <= L + 1; ++k) {
            if (a[k] == 0) continue;
            mpz_class v = (m % 2 == 0) ? a[k] : mpz_class(-a[k]);
            unsigned jj = static_cast<unsigned>(k);
            if (i >= jj) phi.coeffs[{i, jj}] = v;
            else if (phi.coeffs.count({jj, i}) && phi.coeffs[{jj, i}] != v)
                throw InternalError("modular polynomial: asymmetric coefficients");
        }
    }
    validate_modular_polynomial(phi);
    return phi;
}

std::string serialize_modular_polynomial(const ModularPolynomial& phi) {
    std::ostringstream os;
    os << "# classical modular polynomial of level " << phi.ell << "\n";
    os << "# format: l i j coefficient of X^i Y^j, i >= j, symmetric\n";
    for (const auto& [ij, v] : phi.coeffs) os << phi.ell << " " << ij.first << " " << ij.second << " " << v.get_str() << "\n";
    return os.str();
}

ModularPolynomial parse_modular_polynomial(const std::string& text) {
    ModularPolynomial phi;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        unsigned l, i, j;
        std::string v;
        if (!(ls >> l)) continue;
        if (!(ls >> i >> j >> v)) throw DomainError("modular polynomial table: malformed line " + std::to_string(lineno));
        if (phi.ell == 0) phi.ell = l;
        if (l != phi.ell) throw DomainError("modular polynomial table: mixed levels");
        if (i < j) throw DomainError("modular polynomial table: expected i >= j on line " + std::to_string(lineno));
        if (!phi.coeffs.emplace(std::make_pair(i, j), parse_integer(v)).second)
            throw DomainError("modular polynomial table: duplicate monomial on line " + std::to_string(lineno));
    }
    if (phi.ell == 0) throw DomainError("modular polynomial table: empty");
    return phi;
}

void validate_modular_polynomial(const ModularPolynomial& phi, long terms) {
    const long L = phi.ell;
    for (const auto& [ij, v] : phi.coeffs) {
        if (ij.first > static_cast<unsigned>(L + 1)) throw InternalError("modular polynomial: degree exceeds l + 1");
        if (v == 0) throw InternalError("modular polynomial: stored zero coefficient");
    }
    if (phi.coeff(L + 1, 0) != 1) throw InternalError("modular polynomial: not monic of degree l + 1 in X");
    for (long k = 1; k <= L + 1; ++k)
        if (phi.coeff(L + 1, k) != 0) throw InternalError("modular polynomial: X^(l+1) has a non-constant coefficient");

    const long top = terms + 1;
    const long T0 = top + L * (L + 2) + 6;
    Laurent y = j_series(T0);
    Laurent x = laurent_dilate(y, L);
    std::vector<Laurent> xp(L + 2), yp(L + 2);
    xp[0] = laurent_constant(1, x.top);
    yp[0] = laurent_constant(1, y.top);
    for (long k = 1; k <= L + 1; ++k) {
        xp[k] = laurent_mul(xp[k - 1], x);
        yp[k] = laurent_mul(yp[k - 1], y);
    }
    Laurent sum = laurent_constant(0, top);
    sum.low = -(L + 1) * (L + 1);
    sum.c.assign(sum.top - sum.low, 0);
    for (long i = 0; i <= L + 1; ++i)
        for (long jj = 0; jj <= L + 1; ++jj) {
            mpz_class v = phi.coeff(i, jj);
            if (v == 0) continue;
            Laurent t = laurent_scale(laurent_mul(xp[i], yp[jj]), v);
            sum = laurent_add(sum, t);
        }
    if (sum.top < top) throw InternalError("modular polynomial: validation precision too low");
    for (long n = sum.low; n < top; ++n)
        if (sum.coeff(n) != 0)
            throw InternalError("modular polynomial of level " + std::to_string(L) +
                                " fails the q-expansion identity at q^" + std::to_string(n));
}

ModularPolynomial load_modular_polynomial(const std::string& dir, unsigned ell) {
    std::string path = dir + "/phi_" + std::to_string(ell) + ".txt";
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open modular polynomial table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ModularPolynomial phi = parse_modular_polynomial(ss.str());
    if (phi.ell != ell) throw DomainError(path + ": level mismatch");
    validate_modular_polynomial(phi);
    return phi;
}

std::string default_table_dir() {
#ifdef FIBCURVE_DEFAULT_TABLE_DIR
    return FIBCURVE_DEFAULT_TABLE_DIR;
#else
    return "data/modpoly";
#endif
}

ModularPolynomialSet::ModularPolynomialSet(const std::string& dir, std::vector<unsigned> levels) {
    for (unsigned l : levels) tables_.emplace(l, load_modular_polynomial(dir, l));
}

const ModularPolynomial& ModularPolynomialSet::get(unsigned ell) const {
    auto it = tables_.find(ell);
    if (it == tables_.end()) throw DomainError("no modular polynomial table for level " + std::to_string(ell));
    return it->second;
}

std::vector<unsigned> ModularPolynomialSet::levels() const {
    std::vector<unsigned> out;
    for (const auto& [l, _] : tables_) out.push_back(l);
    return out;
}

}  // namespace fibcurve
