#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nls6/grid.hpp"

namespace nls6 {

using Complex = std::complex<double>;
using CField = std::vector<Complex>;
using RField = std::vector<double>;

// State of the coupled system: u drives v through u^2, v drives u through v conj(u).
// kappa is the second equation's dispersion coefficient; kappa = 1/2 is mass-resonance.
template <class GridT>
struct FieldPair {
    std::shared_ptr<const GridT> grid;
    CField u;
    CField v;
    double kappa = 1.0;

    std::size_t size() const { return grid->size(); }
};

template <class GridT>
FieldPair<GridT> make_field_pair(std::shared_ptr<const GridT> grid, CField u, CField v,
                                 double kappa) {
    if (!grid) throw std::invalid_argument("make_field_pair: null grid");
    if (u.size() != grid->size() || v.size() != grid->size())
        throw std::invalid_argument("make_field_pair: field/grid size mismatch");
    if (!(kappa > 0.0)) throw std::invalid_argument("make_field_pair: kappa must be positive");
    return FieldPair<GridT>{std::move(grid), std::move(u), std::move(v), kappa};
}

template <class GridT>
FieldPair<GridT> zero_pair(std::shared_ptr<const GridT> grid, double kappa) {
    const std::size_t sz = grid->size();
    return make_field_pair(std::move(grid), CField(sz), CField(sz), kappa);
}

inline CField to_complex(const RField& f) {
    CField out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = Complex(f[i], 0.0);
    return out;
}

}  // namespace nls6
