#pragma once

#include <utility>

#include "wwdn/halfspace.hpp"

namespace wwdn {

/// (T_lambda p)(y) = int_{-inf}^y e^{lambda (z - y)} p(z) dz, in closed form.
/// Output rates equal the input rates. Throws DivergentIntegral if lambda = 0 and some mu = 0.
[[nodiscard]] ExpPolyProfile t_lambda(const ExpPolyProfile& p, double lambda);

/// (T~_lambda p)(y) = int_y^0 e^{lambda (y - z)} p(z) dz, lambda > 0. Terms with
/// |mu - lambda| < merge_tol * max(1, lambda) use the resonant formula -y^{p+1} e^{lambda y} / (p + 1).
[[nodiscard]] ExpPolyProfile t_tilde_lambda(const ExpPolyProfile& p, double lambda, double merge_tol = 1e-12);

struct ModeZeroSolution {
  ExpPolyProfile profile;
  cplx constant{};
};

/// Decaying solution of u'' = g0, u(0) = 0: profile T_0^2 g0 and constant -(T_0^2 g0)(0).
[[nodiscard]] ModeZeroSolution solve_mode_zero(const ExpPolyProfile& g0);

/// Decaying solution of u'' - |k|^2 u = g, u(0) = 0, for k != 0 (variation of constants).
[[nodiscard]] ExpPolyProfile solve_mode(const ModeIndex& k, const ExpPolyProfile& g, double merge_tol = 1e-12);

/// The flat-boundary inverse L: Delta_{x,y} u = g, u(x, 0) = 0, d_y u -> 0.
/// Throws NonzeroConstantSource if g has a constant part.
[[nodiscard]] HalfCylinderFunction solve_poisson(const HalfCylinderFunction& g, const AlgebraOptions& opt = {});

}  // namespace wwdn
