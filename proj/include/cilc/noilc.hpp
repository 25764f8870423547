#pragma once

#include "cilc/lifted_system.hpp"

namespace cilc {

/// Weights of the next-trial cost
///   J = ||e+||^2 + s ||u+ - u||^2 + r ||u+||^2.
/// s penalises input change, r input magnitude; both must be >= 0 and the
/// synthesis stays well-posed as long as s + r > 0 or P'P is invertible.
struct NoilcWeights {
    double s = 0.0;
    double r = 0.0;
};

/// Norm-optimal gain synthesis: the unique minimizer of J given the plant
/// model is u+ = Q (u + L e) with
///   Q = (P'P + (s+r) I)^-1 (P'P + s I),   L = (P'P + s I)^-1 P'.
/// r = 0 short-circuits to Q = I exactly. Solved via Cholesky; a pivoted
/// fallback kicks in (with a stderr warning) if the factorization fails.
AgentLaw design_noilc(const LiftedPlant& plant, const NoilcWeights& w,
                      int agent_id = 1);

/// J evaluated with the model-predicted next error e+ = e - P (u+ - u).
double next_trial_cost(const LiftedPlant& plant, const Vector& u_prev,
                       const Vector& u_next, const Vector& e_prev,
                       const NoilcWeights& w);

} // namespace cilc
