#include "cilc/noilc.hpp"

#include <iostream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace cilc {

AgentLaw design_noilc(const LiftedPlant& plant, const NoilcWeights& w,
                      int agent_id) {
    if (w.s < 0.0 || w.r < 0.0)
        throw IllPosed("norm-optimal weights must be non-negative");
    const Eigen::Index n = plant.N;
    const Matrix gram = plant.P.transpose() * plant.P;
    const Matrix regularized =
        gram + (w.s + w.r) * Matrix::Identity(n, n);
    const Matrix shifted = gram + w.s * Matrix::Identity(n, n);

    const auto solve_spd = [](const Matrix& A, const Matrix& rhs) {
        Eigen::LLT<Matrix> llt(A);
        if (llt.info() == Eigen::Success) return Matrix(llt.solve(rhs));
        std::cerr << "cilc: Cholesky failed in NO-ILC synthesis, "
                     "falling back to a pivoted factorization\n";
        Eigen::FullPivLU<Matrix> lu(A);
        if (!lu.isInvertible())
            throw IllPosed("NO-ILC normal matrix is singular");
        return Matrix(lu.solve(rhs));
    };

    AgentLaw law;
    law.id = agent_id;
    // r = 0 makes Q the solve of (P'P + sI) against itself; return the
    // identity it equals so the algebraic guarantee Q = I holds bit-exactly.
    law.Q = (w.r == 0.0) ? Matrix::Identity(n, n)
                         : solve_spd(regularized, shifted);
    law.L = solve_spd(shifted, plant.P.transpose());
    return law;
}

double next_trial_cost(const LiftedPlant& plant, const Vector& u_prev,
                       const Vector& u_next, const Vector& e_prev,
                       const NoilcWeights& w) {
    if (u_prev.size() != plant.N || u_next.size() != plant.N ||
        e_prev.size() != plant.N) {
        throw DimensionMismatch("trajectory lengths must equal N");
    }
    const Vector delta = u_next - u_prev;
    const Vector predicted_error = e_prev - plant.P * delta;
    return predicted_error.squaredNorm() + w.s * delta.squaredNorm() +
           w.r * u_next.squaredNorm();
}

} // namespace cilc
