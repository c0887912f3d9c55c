#include "fibcurve/poly.hpp"

#include <algorithm>

namespace fibcurve {

PolyRing::PolyRing(mpz_class p) : p_(std::move(p)) {
    if (p_ < 2) throw DomainError("PolyRing: modulus must be at least 2");
}

void PolyRing::trim(Poly& a) const {
    while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
}

Poly PolyRing::make(std::vector<mpz_class> coeffs) const {
    Poly r(std::move(coeffs));
    for (auto& v : r.c) v = mod(v, p_);
    trim(r);
    return r;
}

Poly PolyRing::constant(const mpz_class& a) const { return make({a}); }
Poly PolyRing::x() const { return make({0, 1}); }
Poly PolyRing::x_minus(const mpz_class& a) const { return make({-a, 1}); }

Poly PolyRing::add(const Poly& a, const Poly& b) const {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        r.c[i] = a.coeff(i) + b.coeff(i);
        if (r.c[i] >= p_) r.c[i] -= p_;
    }
    trim(r);
    return r;
}

Poly PolyRing::sub(const Poly& a, const Poly& b) const {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        r.c[i] = a.coeff(i) - b.coeff(i);
        if (r.c[i] < 0) r.c[i] += p_;
    }
    trim(r);
    return r;
}

Poly PolyRing::neg(const Poly& a) const { return sub(Poly{}, a); }

Poly PolyRing::mul(const Poly& a, const Poly& b) const {
    if (a.is_zero() || b.is_zero()) return {};
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            mpz_addmul(r.c[i + j].get_mpz_t(), a.c[i].get_mpz_t(), b.c[j].get_mpz_t());
    }
    for (auto& v : r.c) mpz_mod(v.get_mpz_t(), v.get_mpz_t(), p_.get_mpz_t());
    trim(r);
    return r;
}

Poly PolyRing::scale(const Poly& a, const mpz_class& s) const {
    Poly r = a;
    for (auto& v : r.c) v = mod(v * s, p_);
    trim(r);
    return r;
}

mpz_class PolyRing::inv(const mpz_class& a) const {
    auto r = fibcurve::invmod(mod(a, p_), p_);
    if (!r) {
        mpz_class g = ::gcd(mod(a, p_), p_);
        throw CompositeDetected(CompositeSignal{g == p_ ? mpz_class(0) : g, "non-invertible coefficient in polynomial arithmetic"});
    }
    return *r;
}

void PolyRing::divmod(const Poly& a, const Poly& b, Poly* q, Poly* r) const {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    Poly rr = a;
    Poly qq;
    int db = b.deg();
    if (rr.deg() >= db) qq.c.assign(rr.deg() - db + 1, 0);
    mpz_class li = inv(b.lead());
    mpz_class t;
    for (int i = rr.deg(); i >= db; --i) {
        if (rr.c[i] == 0) continue;
        t = rr.c[i] * li % p_;
        qq.c[i - db] = t;
        for (int j = 0; j <= db; ++j) mpz_submul(rr.c[i - db + j].get_mpz_t(), t.get_mpz_t(), b.c[j].get_mpz_t());
        for (int j = 0; j <= db; ++j) mpz_mod(rr.c[i - db + j].get_mpz_t(), rr.c[i - db + j].get_mpz_t(), p_.get_mpz_t());
    }
    if (rr.c.size() > static_cast<std::size_t>(db)) rr.c.resize(db);
    trim(rr);
    trim(qq);
    if (q) *q = std::move(qq);
    if (r) *r = std::move(rr);
}

Poly PolyRing::rem(const Poly& a, const Poly& b) const {
    if (a.deg() < b.deg()) return a;
    Poly r;
    divmod(a, b, nullptr, &r);
    return r;
}

Poly PolyRing::quo(const Poly& a, const Poly& b) const {
    Poly q;
    divmod(a, b, &q, nullptr);
    return q;
}

Poly PolyRing::mulmod(const Poly& a, const Poly& b, const Poly& m) const { return rem(mul(a, b), m); }

Poly PolyRing::powmod(const Poly& base, const mpz_class& e, const Poly& m) const {
    if (e < 0) throw DomainError("powmod: negative exponent");
    Poly result = rem(constant(1), m);
    Poly b = rem(base, m);
    for (long i = static_cast<long>(bit_length(e)) - 1; i >= 0; --i) {
        result = mulmod(result, result, m);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = mulmod(result, b, m);
    }
    return result;
}

Poly PolyRing::monic(const Poly& a) const {
    if (a.is_zero()) return a;
    return scale(a, inv(a.lead()));
}

Poly PolyRing::gcd(const Poly& a, const Poly& b) const {
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = rem(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return monic(x);
}

std::optional<Poly> PolyRing::invmod(const Poly& a, const Poly& m) const {
    Poly r0 = m, r1 = rem(a, m);
    Poly s0, s1 = constant(1);
    while (!r1.is_zero()) {
        Poly q, r;
        divmod(r0, r1, &q, &r);
        Poly s = sub(s0, mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r0.deg() != 0) return std::nullopt;
    return rem(scale(s0, inv(r0.c[0])), m);
}

Poly PolyRing::derivative(const Poly& a) const {
    Poly r;
    for (std::size_t i = 1; i < a.c.size(); ++i) r.c.push_back(mod(a.c[i] * static_cast<unsigned long>(i), p_));
    trim(r);
    return r;
}

mpz_class PolyRing::eval(const Poly& a, const mpz_class& x) const {
    mpz_class r = 0;
    for (auto it = a.c.rbegin(); it != a.c.rend(); ++it) r = (r * x + *it) % p_;
    return mod(r, p_);
}

Poly PolyRing::compose_mod(const Poly& a, const Poly& b, const Poly& m) const {
    Poly r;
    Poly bb = rem(b, m);
    for (auto it = a.c.rbegin(); it != a.c.rend(); ++it) r = add(mulmod(r, bb, m), constant(*it));
    return rem(r, m);
}

namespace {

// Deterministic source of field elements for the randomized splitting.
struct Sampler {
    gmp_randclass rng{gmp_randinit_default};
    Sampler() { rng.seed(0x5eed); }
    mpz_class below(const mpz_class& n) { return rng.get_z_range(n); }
};

}  // namespace

std::vector<std::pair<int, Poly>> PolyRing::distinct_degree(const Poly& f) const {
    std::vector<std::pair<int, Poly>> out;
    Poly g = monic(f);
    Poly h = x();
    for (int d = 1; 2 * d <= g.deg(); ++d) {
        h = powmod(h, p_, g);
        Poly t = gcd(g, sub(h, x()));
        if (t.deg() > 0) {
            out.emplace_back(d, t);
            g = quo(g, t);
            h = rem(h, g);
        }
    }
    if (g.deg() > 0) out.emplace_back(g.deg(), g);
    return out;
}

std::vector<Poly> PolyRing::equal_degree(const Poly& f, int d) const {
    Poly g = monic(f);
    if (g.deg() <= 0) return {};
    if (g.deg() == d) return {g};
    if (p_ == 2) {
        // characteristic two: trace map splitting
        Sampler s;
        for (;;) {
            Poly a;
            for (int i = 0; i < g.deg(); ++i) a.c.push_back(s.below(p_));
            trim(a);
            if (a.deg() < 1) continue;
            Poly t = a, acc = a;
            for (int i = 1; i < d; ++i) {
                t = mulmod(t, t, g);
                acc = add(acc, t);
            }
            Poly h = gcd(g, acc);
            if (h.deg() > 0 && h.deg() < g.deg()) {
                auto l = equal_degree(h, d);
                auto r = equal_degree(quo(g, h), d);
                l.insert(l.end(), r.begin(), r.end());
                return l;
            }
        }
    }
    mpz_class e;
    mpz_pow_ui(e.get_mpz_t(), p_.get_mpz_t(), d);
    e = (e - 1) / 2;
    Sampler s;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Poly a;
        for (int i = 0; i < g.deg(); ++i) a.c.push_back(s.below(p_));
        trim(a);
        if (a.deg() < 1) continue;
        Poly b = sub(powmod(a, e, g), constant(1));
        Poly h = gcd(g, b);
        if (h.deg() > 0 && h.deg() < g.deg()) {
            auto l = equal_degree(h, d);
            auto r = equal_degree(quo(g, h), d);
            l.insert(l.end(), r.begin(), r.end());
            return l;
        }
    }
    throw CompositeDetected(CompositeSignal{0, "equal-degree splitting did not terminate"});
}

std::vector<Poly> PolyRing::irreducible_factors(const Poly& f) const {
    if (f.deg() < 1) return {};
    Poly g = monic(f);
    Poly common = gcd(g, derivative(g));
    if (common.deg() > 0) {
        // f / gcd(f, f') is the radical once every multiplicity is below p
        if (p_ <= g.deg()) throw DomainError("irreducible_factors: repeated factors with small characteristic");
        g = quo(g, common);
    }
    std::vector<Poly> out;
    for (auto& [d, part] : distinct_degree(g)) {
        auto fs = equal_degree(part, d);
        out.insert(out.end(), fs.begin(), fs.end());
    }
    std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
        if (a.deg() != b.deg()) return a.deg() < b.deg();
        return std::lexicographical_compare(a.c.rbegin(), a.c.rend(), b.c.rbegin(), b.c.rend());
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<mpz_class> PolyRing::roots(const Poly& f) const {
    std::vector<mpz_class> out;
    if (f.deg() < 1) return out;
    if (p_ < 64) {
        for (mpz_class v = 0; v < p_; ++v)
            if (eval(f, v) == 0) out.push_back(v);
        return out;
    }
    Poly g = monic(f);
    Poly xp = powmod(x(), p_, g);
    Poly lin = gcd(g, sub(xp, x()));
    for (auto& h : equal_degree(lin, 1)) out.push_back(mod(-h.c[0], p_));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fibcurve
