#pragma once

#include <vector>

#include "intertwine/charge.hpp"

namespace itw {

// Sum of products of charges and Hamiltonian powers with time-dependent
// coefficients: R = sum_k coeff_k(t) * F_{k,1} ... F_{k,m}. Factors act
// right-to-left. Compositions are limited to 4th differential order overall,
// at most two charge factors and Hamiltonian power at most two per term.
struct SymFactor {
    enum class Kind { charge, ham_power } kind = Kind::charge;
    ChargeSpec q;
    Bivar V;
    int power = 1;

    static SymFactor charge(ChargeSpec c) {
        SymFactor f;
        f.kind = Kind::charge;
        f.q = std::move(c);
        return f;
    }
    static SymFactor ham(Bivar V, int power = 1) {
        SymFactor f;
        f.kind = Kind::ham_power;
        f.V = std::move(V);
        f.power = power;
        return f;
    }
    int order() const { return kind == Kind::charge ? q.order : 2 * power; }
};

struct SymTerm {
    std::function<cplx(double)> coeff; // of time
    std::vector<SymFactor> factors;    // factors[0] is leftmost
};

struct SymmetryOpSpec {
    std::vector<SymTerm> terms;
    std::string note;
};

int symmetry_order(const SymmetryOpSpec& op);

ComplexField apply_symmetry(const SymmetryOpSpec& op, const ComplexField& psi, double t);

// Convenience builders.
SymmetryOpSpec symmetry_single(ChargeSpec q, std::string note = "");
SymmetryOpSpec symmetry_product(ChargeSpec left, ChargeSpec right, std::string note = "");

} // namespace itw
