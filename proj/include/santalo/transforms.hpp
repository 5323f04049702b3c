#pragma once

#include "santalo/grid.hpp"
#include "santalo/potential.hpp"

namespace santalo {

// Legendre-Fenchel conjugate of a grid-sampled function:
//   f*(y) = sup_x  x.y - f(x),
// computed exactly for the convex minorant of the samples (lower convex
// hull + monotone slope merge). Nodes with value +inf are treated as
// absent. 2D conjugation is two 1D passes (conjugation is separable).
// The result is the conjugate of the *restriction* of f to the grid box.
GridFunction legendre_conjugate(const GridFunction& f);
GridFunction legendre_conjugate(const GridFunction& f, Axis out);
GridFunction legendre_conjugate(const GridFunction& f, Axis out_x, Axis out_y);

// Largest psi with phi(x) + psi(y) <= c |x-y|^2 everywhere:
//   psi(y) = inf_x  c|x-y|^2 - phi(x).
// Quadratic-part-only potentials get the exact closed form; other kinds are
// sampled on the default grid and run through a parabola-envelope distance
// transform. Every call re-checks the defining inequality; a violation
// beyond 1e-9 aborts, because nothing downstream makes sense after that.
Potential moreau_partner(const Potential& phi, double c);
GridFunction moreau_partner_grid(const GridFunction& phi, double c);

// Polar (dual) log-density: for f = e^{logf}, the largest g with
// f(x) g(y) <= e^{-x.y}, i.e. log g = -(-logf)*. Closed forms cover
// centered Gaussians, radial powers, and gauge powers; everything else goes
// through the grid conjugate.
Potential polar_function(const Potential& logf);

namespace ref {
// Direct O(n^2)-per-line scans; oracles for the fast paths.
GridFunction legendre_conjugate(const GridFunction& f, Axis out);
GridFunction moreau_partner_grid(const GridFunction& phi, double c);
}  // namespace ref

}  // namespace santalo
