// SPDX-License-Identifier: Apache-2.0
#pragma once

// Row-wise Poincare-ball ops on the tape. Row i of every operand lives in the
// ball of curvature c[i] (an n x 1 Var), so gradients reach the curvature too.

#include "eth/tape.hpp"

namespace eth::ad {

// exp_0^{c_i}(v_i) for every row, projected into the ball.
Var exp_map_rows(Var v, Var c);
// Rescales rows whose norm reaches (1 - kBallEps)/sqrt(c_i).
Var project_rows(Var x, Var c);
// x_i (+)_{c_i} y_i, projected.
Var mobius_add_rows(Var x, Var y, Var c);
// n x 1 geodesic distance between rows x_i and y_i.
Var poincare_distance_rows(Var x, Var y, Var c);
// out(i, a) = d^{c_i}(x_i, exp_0^{c_i}(h_a))^2 for ball points x (n x d) and
// tangent candidates h (m x d).
Var poincare_pair_sqdist(Var x, Var h, Var c);

}  // namespace eth::ad
