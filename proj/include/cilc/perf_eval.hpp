#pragma once

#include <optional>
#include <vector>

#include "cilc/collective.hpp"

namespace cilc {

/// Trial propagators of the closed-form error formulas. The collective
/// pair advances as A_bar_j = Omega_{f_j} A_bar_{j-1},
/// B_bar_j = Omega_{f_j} B_bar_{j-1} + Psi_{f_j}, seeded by the empty
/// product/sum A_bar_0 = I, B_bar_0 = 0 so that e_bar_0 = e_0; the update
/// from trial j to j+1 is governed by f_{j+1}. f_j is the best performer
/// elected at trial j (f_0 is carried for completeness but never
/// multiplies anything).
struct Propagators {
    std::vector<Matrix> A_bar; // A_bar[j], j = 0..J
    std::vector<Matrix> B_bar;
    std::vector<int> f;        // elected ids, 1-based
};

/// e~_j = Omega^j e0 + (sum_{p=1..j} Omega^(j-p) Psi)(r - d), powers built
/// iteratively.
Vector isolated_error_closed_form(const Matrix& omega, const Matrix& psi,
                                  const Vector& e0, const Vector& rd, int j);

/// e_bar_j through the propagator recursion for the given election
/// sequence f (needs f_0..f_j, so length >= j+1).
Vector cilc_error_closed_form(const std::vector<Matrix>& omegas,
                              const std::vector<Matrix>& psis,
                              const std::vector<int>& f, const Vector& e0,
                              const Vector& rd, int j);

/// e_j^m = Omega_m A_bar_{j-1} e0 + (Psi_m + Omega_m B_bar_{j-1})(r - d):
/// agent m's error at trial j inside the collective, from the trial-(j-1)
/// propagators.
Vector collaborative_error_closed_form(const Matrix& omega_m,
                                       const Matrix& psi_m,
                                       const Matrix& A_bar_prev,
                                       const Matrix& B_bar_prev,
                                       const Vector& e0, const Vector& rd);

/// Predicts the election sequence f_0..f_horizon without simulating
/// trials: f_j minimizes the predicted squared error norm through the
/// recursively maintained propagators; ties break to the lowest id
/// (same rule as the trial loop).
Propagators predict_best_performers(const std::vector<Matrix>& omegas,
                                    const std::vector<Matrix>& psis,
                                    const Vector& e0, const Vector& rd,
                                    int horizon);

/// F_j^m = ||e_bar_j||^2 - ||e~_j^m||^2 in closed form; row j, column m-1.
/// The collective is well-performing up to the horizon iff all entries
/// are <= 0. When e0 == r - d the single-quadratic-form path is used.
Matrix well_performing_scores(const Collective& collective, const Vector& e0,
                              const Vector& rd, int horizon);

struct WellPerformingReport {
    bool certified = false; // all F_j^m <= tolerance up to the horizon
    int horizon = 0;        // the "for all j" claim is truncated here
    double tolerance = 0.0;
    std::optional<std::pair<int, int>> first_violation; // (trial, agent id)
};

/// Checks F_j^m <= 1e-12 ||e0||^2 for all j <= horizon, m. The infinite
/// quantifier of the definition is honestly truncated: the report carries
/// the horizon it was checked to.
WellPerformingReport certify_well_performing(const Collective& collective,
                                             const Vector& e0, const Vector& rd,
                                             int horizon);

} // namespace cilc
