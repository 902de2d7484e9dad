#pragma once

#include "opext/resolvents.hpp"

namespace opext {

// Haar-like random frames; dom and ran independent
IsometryOp random_isometry_op(long n, long d, Rng& rng);
// D^* A = H Hermitian, the part leaving D is a free Gaussian block
SymmetricOp random_symmetric_op(long n, long d, Rng& rng);
// constant unitary map from src onto dst (equal dimensions), ambient form
CMatrix random_unitary_between(const Subspace& src, const Subspace& dst, Rng& rng);

// V + o on C^{n+m} closed by a random unitary from N_0 onto N_inf
ExitSpaceModel random_unitary_model(const IsometryOp& v, long m, Rng& rng);
// A + A_e closed by an admissible isometry; A_e random symmetric with domain dimension d_e
ExitSpaceModel random_hermitian_model(const LinOp& a, long m, long d_e, cplx z, Rng& rng,
                                      const TolPolicy& tol = {});

}  // namespace opext
