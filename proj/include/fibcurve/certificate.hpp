#pragma once

#include "fibcurve/curve.hpp"
#include "fibcurve/primality.hpp"

#include <json.hpp>

#include <string>

namespace fibcurve {

inline constexpr int kCertificateSchema = 1;

nlohmann::json curve_to_json(const Curve& E);
Curve curve_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const Point& P);
Point point_from_json(const nlohmann::json& j);
nlohmann::json ecpp_to_json(const EcppCertificate& c);
EcppCertificate ecpp_from_json(const nlohmann::json& j);

// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);
// Throws DomainError when the text is not valid JSON.
nlohmann::json parse_certificate(const std::string& text);

struct CertCheck {
    bool accept = false;
    std::string reason;  // first failing clause
};

// Cheap re-verification of a construction certificate: norm equation, Hasse
// relation, curve and point, ECPP chain for f_q, order evidence, primality of p.
CertCheck verify_certificate(const nlohmann::json& cert);

}  // namespace fibcurve
