#include "intertwine/symmetry.hpp"

#include "intertwine/kernels.hpp"

namespace itw {

int symmetry_order(const SymmetryOpSpec& op) {
    int worst = 0;
    for (const auto& term : op.terms) {
        int o = 0;
        for (const auto& f : term.factors) o += f.order();
        worst = std::max(worst, o);
    }
    return worst;
}

ComplexField apply_symmetry(const SymmetryOpSpec& op, const ComplexField& psi, double t) {
    require(!op.terms.empty(), "invalid-kind", "symmetry operator has no terms");
    for (const auto& term : op.terms) {
        int order = 0, charges = 0, ham = 0;
        for (const auto& f : term.factors) {
            order += f.order();
            if (f.kind == SymFactor::Kind::charge)
                ++charges;
            else
                ham += f.power;
        }
        require(order <= 4 && charges <= 2 && ham <= 2, "excessive-order",
                "symmetry term exceeds the composition budget (order " + std::to_string(order) +
                    ", " + std::to_string(charges) + " charges, Hamiltonian power " +
                    std::to_string(ham) + ")");
    }

    ComplexField acc(psi.grid);
    for (const auto& term : op.terms) {
        ComplexField cur = psi;
        for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
            if (it->kind == SymFactor::Kind::charge) {
                cur = apply_charge(it->q, cur, t);
            } else {
                for (int p = 0; p < it->power; ++p) cur = hamiltonian_apply(it->V, cur, t);
            }
        }
        const cplx c = term.coeff ? term.coeff(t) : cplx(1.0, 0.0);
        for (int i = 0; i < acc.grid.n; ++i) acc.values[i] += c * cur.values[i];
        acc.unreliable_band = std::max(acc.unreliable_band, cur.unreliable_band);
    }
    return acc;
}

SymmetryOpSpec symmetry_single(ChargeSpec q, std::string note) {
    SymmetryOpSpec op;
    op.note = std::move(note);
    SymTerm term;
    term.coeff = nullptr;
    term.factors.push_back(SymFactor::charge(std::move(q)));
    op.terms.push_back(std::move(term));
    return op;
}

SymmetryOpSpec symmetry_product(ChargeSpec left, ChargeSpec right, std::string note) {
    SymmetryOpSpec op;
    op.note = std::move(note);
    SymTerm term;
    term.coeff = nullptr;
    term.factors.push_back(SymFactor::charge(std::move(left)));
    term.factors.push_back(SymFactor::charge(std::move(right)));
    op.terms.push_back(std::move(term));
    return op;
}

} // namespace itw
