#include "fibcurve/modpoly.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: gen_modpoly OUTDIR LEVEL...\n";
        return 3;
    }
    std::string dir = argv[1];
    for (int k = 2; k < argc; ++k) {
        unsigned ell = static_cast<unsigned>(std::stoul(argv[k]));
        auto phi = fibcurve::generate_modular_polynomial(ell);
        std::string path = dir + "/phi_" + std::to_string(ell) + ".txt";
        std::ofstream out(path);
        out << fibcurve::serialize_modular_polynomial(phi);
        std::cout << path << ": " << phi.coeffs.size() << " monomials\n";
    }
    return 0;
}
