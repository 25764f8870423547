#pragma once

// Shared generators and simulation oracles for the test suites. Everything
// here is seeded and deterministic.

#include <random>

#include "cilc/collective.hpp"
#include "cilc/lifted_system.hpp"

namespace cilc::testing {

using Rng = std::mt19937_64;

inline Matrix random_matrix(Rng& rng, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = uni(rng);
    return m;
}

inline Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uni(rng);
    return v;
}

inline Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    return Eigen::HouseholderQR<Matrix>(g).householderQ();
}

// Well-conditioned plant: singular values in [0.5, 2].
inline LiftedPlant random_plant(Rng& rng, Eigen::Index n,
                                bool with_disturbance = true) {
    std::uniform_real_distribution<double> sv(0.5, 2.0);
    Vector singular(n);
    for (Eigen::Index i = 0; i < n; ++i) singular(i) = sv(rng);
    const Matrix P = random_orthogonal(rng, n) * singular.asDiagonal() *
                     random_orthogonal(rng, n);
    const Vector d =
        with_disturbance ? random_vector(rng, n, 0.5) : Vector(Vector::Zero(n));
    return make_lifted_plant(P, d);
}

inline AgentLaw random_law(Rng& rng, Eigen::Index n, int id = 1,
                           double scale = 0.8) {
    return AgentLaw{id, random_matrix(rng, n, scale),
                    random_matrix(rng, n, scale)};
}

// Law with gamma < 1: Q near the identity, L near a scaled plant inverse.
// Rejection keeps only actual contractions.
inline AgentLaw random_monotone_law(const LiftedPlant& plant, Rng& rng,
                                    int id = 1, bool zero_residual = false) {
    std::uniform_real_distribution<double> alpha_dist(0.3, 0.95);
    const Matrix p_inverse = plant.P.inverse();
    for (int attempt = 0; attempt < 200; ++attempt) {
        const double alpha = alpha_dist(rng);
        AgentLaw law;
        law.id = id;
        law.L = alpha * p_inverse + random_matrix(rng, plant.N, 0.02);
        law.Q = zero_residual
                    ? Matrix(Matrix::Identity(plant.N, plant.N))
                    : Matrix(Matrix::Identity(plant.N, plant.N) +
                             random_matrix(rng, plant.N, 0.02));
        if (induced_norm2(contraction_matrix(plant, law)) < 0.98) return law;
    }
    throw std::logic_error("random_monotone_law: rejection sampling failed");
}

inline AgentLaw deadbeat_law(const LiftedPlant& plant, int id = 1) {
    return AgentLaw{id, Matrix::Identity(plant.N, plant.N),
                    plant.P.inverse()};
}

inline std::vector<double> norms_of(const std::vector<TrialRecord>& run) {
    std::vector<double> norms;
    norms.reserve(run.size());
    for (const auto& rec : run) norms.push_back(rec.e_norm);
    return norms;
}

} // namespace cilc::testing
