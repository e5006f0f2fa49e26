#pragma once

#include "rotsmag/fields.hpp"

namespace rotsmag {

/// Discrete curl on the MAC layout. Tangential velocity at a Dirichlet
/// boundary is extended by odd reflection, so a wall edge sees
/// ∂u_t/∂n ≈ 2u_t/h. In 2D the result is the scalar vorticity on nodes.
EdgeField curl(const VectorField& u);

/// Exact adjoint of curl() with respect to the L² products of
/// VectorField and EdgeField: inner(curl(u), w) == inner(u, curl_adjoint(w)).
VectorField curl_adjoint(const EdgeField& w);

/// MAC divergence at cell centers.
ScalarField divergence(const VectorField& u);

/// Cell-to-face gradient; zero on Dirichlet boundary faces. Satisfies
/// inner(gradient(phi), u) == -inner(phi, divergence(u)).
VectorField gradient(const ScalarField& phi);

/// Stream-function curl: nodes (2D) or edges (3D) to faces, u = K ψ with
/// divergence(K ψ) == 0 exactly. In 2D u = (∂ψ/∂y, -∂ψ/∂x).
VectorField potential_curl(const EdgeField& psi);

}  // namespace rotsmag
