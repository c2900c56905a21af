#pragma once

#include <vector>

#include "aggdiff/solver.hpp"

namespace aggdiff::detail {

// div(rho (grad W * psi)) in spectral form.
void bilinear_flux(const Grid& grid, const std::vector<Complex>& rho_hat,
                   const std::vector<Complex>& psi_hat, const Interaction& interaction,
                   bool dealias, std::vector<Complex>& out);

}  // namespace aggdiff::detail
