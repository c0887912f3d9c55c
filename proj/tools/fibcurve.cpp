#include "fibcurve/certificate.hpp"
#include "fibcurve/classpoly.hpp"
#include "fibcurve/curve.hpp"
#include "fibcurve/fibonacci.hpp"
#include "fibcurve/modarith.hpp"
#include "fibcurve/pipeline.hpp"
#include "fibcurve/qforms.hpp"
#include "fibcurve/schoof.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace fibcurve;

namespace {

enum Exit { kOk = 0, kReject = 1, kInconclusive = 2, kUsage = 3 };

std::int64_t to_i64(const std::string& s) {
    mpz_class z = parse_integer(s);
    if (!z.fits_slong_p()) throw DomainError("value out of range: " + s);
    return z.get_si();
}

std::pair<mpz_class, mpz_class> parse_pair(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw DomainError("expected a,b but got '" + s + "'");
    return {parse_integer(s.substr(0, comma)), parse_integer(s.substr(comma + 1))};
}

std::string poly_string(const ClassPolynomial& H) {
    std::ostringstream o;
    for (int i = H.degree(); i >= 0; --i) {
        const mpz_class& c = H.coeffs[i];
        if (c == 0 && i != 0) continue;
        if (i != H.degree()) o << (c < 0 ? " - " : " + ");
        else if (c < 0) o << "-";
        mpz_class a = abs(c);
        if (i == 0 || a != 1) o << a;
        if (i >= 1) o << "X";
        if (i > 1) o << "^" << i;
    }
    return o.str();
}

void print_summary(const PipelineResult& r) {
    const auto& c = r.certificate;
    std::cout << "q = " << c["q"] << ", f_q = " << c["f_q"].get<std::string>() << "\n";
    std::cout << "verdict: " << to_string(r.verdict);
    if (!r.failing_stage.empty()) std::cout << " (stage: " << r.failing_stage << ")";
    std::cout << "\n";
    if (r.signal) {
        std::cout << "witness: " << r.signal->reason;
        if (r.signal->factor != 0) std::cout << ", factor " << r.signal->factor;
        std::cout << "\n";
    }
    if (c.contains("iterations")) std::cout << "discriminants tried: " << c["iterations"] << "\n";
    if (r.chosen) {
        std::cout << "D = " << r.chosen->D << ", p = " << r.chosen->p << ", t = " << r.chosen->t << "\n";
        std::cout << "curve: " << to_string(r.chosen->E) << "\n";
        std::cout << "point: " << to_string(r.chosen->P) << "\n";
    }
    if (c.contains("ecpp_source")) std::cout << "f_q proved by: " << c["ecpp_source"].get<std::string>() << "\n";
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Constructed:
        case Verdict::Prime: return kOk;
        case Verdict::Composite: return kReject;
        default: return kInconclusive;
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ResourceError("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elliptic curves of Fibonacci prime order"};
    app.require_subcommand(1);

    unsigned long index = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string config_path, out_path, cert_path;
    bool json_out = false;

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--index,-q", index, "prime index q")->required();
        sub->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_flag("--json", json_out, "print the full certificate");
        sub->add_option("--out,-o", out_path, "write the certificate to a file");
    };
    auto* construct_cmd = app.add_subcommand("construct", "build a curve of order f_q");
    add_run_options(construct_cmd);
    auto* check_cmd = app.add_subcommand("check", "primality verdict for f_q");
    add_run_options(check_cmd);

    auto* verify_cert_cmd = app.add_subcommand("verify-cert", "re-check a certificate file");
    verify_cert_cmd->add_option("file", cert_path)->required();

    std::string n_str, m_str, d_str, a_str, p_str, curve_str, j_str, t_str;
    auto* fib_cmd = app.add_subcommand("fib", "Fibonacci number f_n");
    fib_cmd->add_option("n", n_str)->required();
    fib_cmd->add_option("--mod", m_str, "reduce modulo m");

    std::string method = "analytic";
    unsigned digits = 0;
    auto* hilbert_cmd = app.add_subcommand("hilbert", "Hilbert class polynomial");
    hilbert_cmd->add_option("-D", d_str, "negative discriminant")->required();
    hilbert_cmd->add_option("--mod", p_str, "reduce modulo a prime");
    hilbert_cmd->add_option("--method", method, "analytic, crt or both")
        ->check(CLI::IsMember({"analytic", "crt", "both"}));
    hilbert_cmd->add_option("--digits", digits, "fixed working precision (analytic)");

    auto* corn_cmd = app.add_subcommand("cornacchia", "solve x^2 + d y^2 = m");
    corn_cmd->add_option("-d", d_str)->required();
    corn_cmd->add_option("-m", m_str)->required();

    auto* sqrt_cmd = app.add_subcommand("sqrtmod", "square root modulo a prime");
    sqrt_cmd->add_option("-a", a_str)->required();
    sqrt_cmd->add_option("-p", p_str)->required();

    auto* cg_cmd = app.add_subcommand("classgroup", "reduced forms and class number");
    cg_cmd->add_option("-D", d_str)->required();

    auto* schoof_cmd = app.add_subcommand("schoof", "trace of Frobenius by Schoof's algorithm");
    schoof_cmd->add_option("--curve", curve_str, "a,b")->required();
    schoof_cmd->add_option("--mod", p_str)->required();

    auto* curve_cmd = app.add_subcommand("curve", "curve data, twists and group order");
    curve_cmd->add_option("--curve", curve_str, "a,b");
    curve_cmd->add_option("-j", j_str, "build from a j-invariant");
    curve_cmd->add_option("--mod", p_str)->required();

    auto* verify_cmd = app.add_subcommand("verify", "Elkies and eigenvalue passes on one curve");
    verify_cmd->add_option("--curve", curve_str, "a,b")->required();
    verify_cmd->add_option("--mod", p_str)->required();
    verify_cmd->add_option("--trace", t_str, "claimed trace t = p + 1 - #E")->required();
    verify_cmd->add_option("-D", d_str, "CM discriminant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*construct_cmd || *check_cmd) {
            Config cfg = config_path.empty() ? Config{} : load_config(config_path);
            if (seed_given) cfg.seed = seed;
            PipelineResult r = *construct_cmd ? construct(index, cfg) : check_primality(index, cfg);
            std::string text = canonical_dump(r.certificate);
            if (!out_path.empty()) write_text(out_path, text);
            if (json_out) std::cout << text;
            else print_summary(r);
            return verdict_exit(r.verdict);
        }
        if (*verify_cert_cmd) {
            std::ifstream in(cert_path);
            if (!in) {
                std::cerr << "cannot read " << cert_path << "\n";
                return kUsage;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            CertCheck c;
            try {
                c = verify_certificate(parse_certificate(ss.str()));
            } catch (const DomainError& e) {
                c = CertCheck{false, e.what()};
            }
            std::cout << (c.accept ? "accept" : "reject: " + c.reason) << "\n";
            return c.accept ? kOk : kReject;
        }
        if (*fib_cmd) {
            mpz_class n = parse_integer(n_str);
            if (n < 0) throw DomainError("n must be non-negative");
            if (!m_str.empty()) {
                std::cout << fib_pair_mod(n, parse_integer(m_str)).first << "\n";
            } else {
                if (!n.fits_ulong_p() || n > 10'000'000) throw DomainError("n too large without --mod");
                std::cout << fib(n.get_ui()) << "\n";
            }
            return kOk;
        }
        if (*hilbert_cmd) {
            std::int64_t D = to_i64(d_str);
            std::optional<mpz_class> p;
            if (!p_str.empty()) p = parse_integer(p_str);
            if (method == "crt" || method == "both") {
                ModularPolynomialSet tables;
                ClassPolynomial H = p ? hilbert_crt(D, *p, tables) : hilbert_crt_integer(D, tables);
                std::cout << "crt:      " << poly_string(H) << "\n";
                if (method == "both") {
                    ClassPolynomial A = hilbert_analytic(D, digits);
                    if (p) A = A.reduce_mod(*p);
                    std::cout << "analytic: " << poly_string(A) << "\n";
                    bool same = A.coeffs == H.coeffs;
                    std::cout << (same ? "methods agree" : "methods DISAGREE") << "\n";
                    return same ? kOk : kReject;
                }
                return kOk;
            }
            ClassPolynomial A = hilbert_analytic(D, digits);
            std::cout << poly_string(p ? A.reduce_mod(*p) : A) << "\n";
            std::cerr << "precision " << A.precision_digits << " digits, max rounding residue " << A.max_residue << "\n";
            return kOk;
        }
        if (*corn_cmd) {
            auto s = cornacchia(parse_integer(d_str), parse_integer(m_str));
            if (!s) {
                std::cout << "no primitive solution\n";
                return kReject;
            }
            std::cout << "x = " << s->first << ", y = " << s->second << "\n";
            return kOk;
        }
        if (*sqrt_cmd) {
            mpz_class p = parse_integer(p_str);
            try {
                auto r = sqrt_mod(parse_integer(a_str), p);
                if (is_composite(r)) {
                    const auto& c = std::get<CompositeSignal>(r);
                    std::cout << "modulus is composite: " << c.reason << "\n";
                    return kReject;
                }
                std::cout << canonical_root(std::get<mpz_class>(r), p) << "\n";
                return kOk;
            } catch (const NotASquare&) {
                std::cout << "not a quadratic residue\n";
                return kReject;
            }
        }
        if (*cg_cmd) {
            std::int64_t D = to_i64(d_str);
            auto forms = reduced_forms(D);
            std::cout << "h(" << D << ") = " << forms.size() << "\n";
            for (const auto& f : forms) std::cout << "  " << to_string(f) << "  order " << form_order(f) << "\n";
            return kOk;
        }
        if (*schoof_cmd) {
            auto [a, b] = parse_pair(curve_str);
            Curve E = make_curve(parse_integer(p_str), a, b);
            std::int64_t t = schoof_trace(E);
            std::cout << "t = " << t << "\n#E = " << E.p + 1 - t << "\n";
            return kOk;
        }
        if (*curve_cmd) {
            mpz_class p = parse_integer(p_str);
            Curve E;
            if (!j_str.empty()) E = value_or_throw(curve_from_j(mod(parse_integer(j_str), p), p));
            else if (!curve_str.empty()) {
                auto [a, b] = parse_pair(curve_str);
                E = make_curve(p, a, b);
            } else {
                throw DomainError("give --curve a,b or -j r");
            }
            auto order = [](const Curve& C) {
                return C.p <= 10'000'000 ? mpz_class(static_cast<unsigned long>(order_exhaustive(C))) : order_bsgs(C);
            };
            std::cout << "curve: " << to_string(E) << "\n";
            std::cout << "j = " << value_or_throw(j_invariant(E)) << "\n";
            std::cout << "#E = " << order(E) << "\n";
            if (E.a == 0 || E.b == 0) {
                auto fam = higher_twists(E);
                for (const auto& C : fam.curves) std::cout << "twist: " << to_string(C) << "  #" << order(C) << "\n";
                if (fam.supersingular) std::cout << "supersingular\n";
            } else {
                Curve T = canonical_twist(E);
                std::cout << "twist: " << to_string(T) << "  #" << order(T) << "\n";
            }
            return kOk;
        }
        if (*verify_cmd) {
            auto [a, b] = parse_pair(curve_str);
            VerifyCandidate c;
            c.E = make_curve(parse_integer(p_str), a, b);
            c.t = parse_integer(t_str);
            c.D = d_str.empty() ? 0 : to_i64(d_str);
            if (c.D == 0) {
                mpz_class disc = c.t * c.t - 4 * c.E.p;
                if (!disc.fits_slong_p()) throw DomainError("give -D for large p");
                c.D = disc.get_si();
            }
            ModularPolynomialSet tables;
            auto after_elkies = elkies_verification_pass({c}, tables);
            if (after_elkies.empty()) {
                std::cout << "removed by the Elkies pass\n";
                return kReject;
            }
            auto kept = eigenvalue_verification_pass(after_elkies);
            if (kept.empty()) {
                std::cout << "removed by the eigenvalue pass\n";
                return kReject;
            }
            for (const auto& line : kept.front().log) std::cout << line << "\n";
            std::cout << "kept (" << kept.front().method << ")\n";
            return kOk;
        }
    } catch (const CompositeDetected& e) {
        std::cout << e.what() << "\n";
        return kReject;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kInconclusive;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kInconclusive;
    }
    return kUsage;
}
