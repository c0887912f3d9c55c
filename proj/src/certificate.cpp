#include "fibcurve/certificate.hpp"

#include "fibcurve/fibonacci.hpp"

namespace fibcurve {

using nlohmann::json;

namespace {

mpz_class big(const json& j, const char* key) {
    if (!j.contains(key)) throw DomainError(std::string("certificate: missing field '") + key + "'");
    const json& v = j.at(key);
    if (v.is_string()) return parse_integer(v.get<std::string>());
    if (v.is_number_integer()) return mpz_class(std::to_string(v.get<long long>()));
    throw DomainError(std::string("certificate: field '") + key + "' is not an integer");
}

}  // namespace

json curve_to_json(const Curve& E) { return {{"p", dec(E.p)}, {"a", dec(E.a)}, {"b", dec(E.b)}}; }

Curve curve_from_json(const json& j) { return Curve{big(j, "p"), big(j, "a"), big(j, "b")}; }

json point_to_json(const Point& P) {
    if (P.inf) return {{"infinity", true}};
    return {{"x", dec(P.x)}, {"y", dec(P.y)}};
}

Point point_from_json(const json& j) {
    if (j.value("infinity", false)) return Point::infinity();
    return Point::affine(big(j, "x"), big(j, "y"));
}

json ecpp_to_json(const EcppCertificate& c) {
    json steps = json::array();
    for (const auto& s : c.steps) {
        steps.push_back({{"N", dec(s.N)},
                         {"D", s.D},
                         {"x", dec(s.x)},
                         {"y", dec(s.y)},
                         {"m", dec(s.m)},
                         {"k", dec(s.k)},
                         {"q", dec(s.q)},
                         {"curve", curve_to_json(s.E)},
                         {"point", point_to_json(s.P)}});
    }
    return {{"N", dec(c.N)}, {"steps", steps}, {"floor", kTrialDivisionFloor}};
}

EcppCertificate ecpp_from_json(const json& j) {
    EcppCertificate c;
    c.N = big(j, "N");
    for (const auto& s : j.at("steps")) {
        EcppStep st;
        st.N = big(s, "N");
        st.D = s.at("D").get<std::int64_t>();
        st.x = big(s, "x");
        st.y = big(s, "y");
        st.m = big(s, "m");
        st.k = big(s, "k");
        st.q = big(s, "q");
        st.E = curve_from_json(s.at("curve"));
        st.P = point_from_json(s.at("point"));
        c.steps.push_back(std::move(st));
    }
    return c;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

json parse_certificate(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("certificate: ") + e.what());
    }
}

namespace {

CertCheck reject(std::string why) { return CertCheck{false, std::move(why)}; }

CertCheck verify_impl(const json& cert) {
    if (cert.value("schema_version", 0) != kCertificateSchema) return reject("schema-version");
    if (cert.value("verdict", std::string()) != "constructed") return reject("not-a-construction");
    const unsigned long q = cert.at("q").get<unsigned long>();
    if (!is_pipeline_index(q)) return reject("index");
    const mpz_class f = big(cert, "f_q");
    if (f != fib(q)) return reject("fibonacci-value");

    const json& ch = cert.at("chosen");
    const std::int64_t D = ch.at("D").get<std::int64_t>();
    const mpz_class x = big(ch, "x"), y = big(ch, "y"), p = big(ch, "p");
    if (D >= 0 || 4 * f != x * x + mpz_class(static_cast<long>(-D)) * y * y) return reject("norm-equation");
    if (p != f + 1 - x && p != f + 1 + x) return reject("hasse-relation");
    if (big(ch, "t") != p + 1 - f) return reject("trace");

    const Curve E = curve_from_json(cert.at("curve"));
    if (E.p != p) return reject("curve-modulus");
    if (p <= 3 || gcd(mod(4 * E.a * E.a * E.a + 27 * E.b * E.b, p), p) != 1) return reject("curve-singular");
    const Point P = point_from_json(cert.at("point"));
    if (P.inf || !on_curve(P, E)) return reject("point-not-on-curve");

    const EcppCertificate chain = ecpp_from_json(cert.at("ecpp"));
    if (chain.N != f) return reject("ecpp-subject");
    EcppCheck ec = ecpp_check(chain);
    if (!ec.verified) return reject("ecpp-chain: " + ec.reason);

    // f_q prime and f_q P = O with P != O give a point of order f_q; 2 f_q lies
    // beyond the Hasse interval of p, so #E = f_q.
    auto fP = scalar_mul(f, P, E);
    if (failed(fP) || !point_of(fP).inf) return reject("order-evidence");
    mpz_class hi = p + 1 + 2 * isqrt(p) + 2;
    if (2 * f <= hi) return reject("order-evidence");
    const json& ev = cert.at("order_evidence");
    if (ev.contains("count") && big(ev, "count") != f) return reject("order-evidence");

    // p is prime: a curve over Z/pZ with a point of prime order f_q beyond the bound
    EcppStep ps;
    ps.N = p;
    ps.m = f;
    ps.k = 1;
    ps.q = f;
    ps.E = E;
    ps.P = P;
    EcppCheck pc = ecpp_check_step(ps);
    if (!pc.verified) return reject("p-primality: " + pc.reason);
    return CertCheck{true, ""};
}

}  // namespace

CertCheck verify_certificate(const json& cert) {
    try {
        return verify_impl(cert);
    } catch (const json::exception& e) {
        return reject(std::string("malformed: ") + e.what());
    } catch (const DomainError& e) {
        return reject(std::string("malformed: ") + e.what());
    }
}

}  // namespace fibcurve
