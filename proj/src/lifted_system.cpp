#include "cilc/lifted_system.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace cilc {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw DimensionMismatch(msg);
}

// X = M P^-1 without forming P^-1: solve P^T X^T = M^T.
Matrix solve_right(const Matrix& M, const Matrix& P) {
    Eigen::PartialPivLU<Matrix> lu(P.transpose());
    return lu.solve(M.transpose()).transpose();
}

} // namespace

double induced_norm2(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

double spectral_radius(const Matrix& A) {
    Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

LiftedPlant make_lifted_plant(const Matrix& P, const Vector& d,
                              double tolerance) {
    require(P.rows() == P.cols(), "plant matrix P must be square");
    require(d.size() == P.rows(), "disturbance d must have length N");
    Eigen::JacobiSVD<Matrix> svd(P);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smin > tolerance * smax)) {
        throw SingularPlant("plant matrix P fails the invertibility tolerance");
    }
    return LiftedPlant{P, d, P.rows()};
}

Vector simulate_trial(const LiftedPlant& plant, const Vector& u) {
    require(u.size() == plant.N, "input trajectory length must equal N");
    return plant.P * u + plant.d;
}

Vector ilc_update(const AgentLaw& law, const Vector& u, const Vector& e) {
    require(law.Q.rows() == law.Q.cols() && law.L.rows() == law.L.cols(),
            "Q and L must be square");
    require(u.size() == law.Q.rows() && e.size() == law.L.rows(),
            "trajectory lengths must match the law dimension");
    return law.Q * (u + law.L * e);
}

Matrix contraction_matrix(const LiftedPlant& plant, const AgentLaw& law) {
    require(law.Q.rows() == plant.N && law.Q.cols() == plant.N &&
                law.L.rows() == plant.N && law.L.cols() == plant.N,
            "law must be dimensioned for the plant");
    const Matrix inner =
        plant.P * law.Q *
        (Matrix::Identity(plant.N, plant.N) - law.L * plant.P);
    return solve_right(inner, plant.P);
}

Matrix filter_matrix(const LiftedPlant& plant, const AgentLaw& law) {
    require(law.Q.rows() == plant.N && law.Q.cols() == plant.N,
            "law must be dimensioned for the plant");
    return Matrix::Identity(plant.N, plant.N) -
           solve_right(plant.P * law.Q, plant.P);
}

ConvergenceReport analyze_agent(const LiftedPlant& plant, const AgentLaw& law,
                                const Vector& r) {
    require(r.size() == plant.N, "reference length must equal N");
    ConvergenceReport rep;

    const Matrix iteration =
        law.Q * (Matrix::Identity(plant.N, plant.N) - law.L * plant.P);
    rep.rho = spectral_radius(iteration);
    rep.asymptotically_stable = rep.rho < 1.0;

    const Matrix omega = contraction_matrix(plant, law);
    const Matrix psi = filter_matrix(plant, law);
    rep.gamma = induced_norm2(omega);
    rep.monotone_above_threshold = rep.gamma < 1.0;

    const Vector rd = r - plant.d;
    if (rep.gamma < 1.0) {
        rep.kappa = (psi * rd).norm() / (1.0 - rep.gamma);
        rep.kappa_finite = true;
    } else {
        rep.kappa = std::numeric_limits<double>::infinity();
        rep.kappa_finite = false;
    }

    if (rep.asymptotically_stable) {
        // Fixed point of e+ = Omega e + Psi (r - d); I - Omega is
        // invertible because rho(Omega) = rho < 1.
        const Matrix i_minus_omega =
            Matrix::Identity(plant.N, plant.N) - omega;
        rep.residual_error =
            Eigen::PartialPivLU<Matrix>(i_minus_omega).solve(psi * rd);
    }
    return rep;
}

std::vector<TrialRecord> run_isolated_ilc_custom(const PlantSim& sim,
                                                 const AgentLaw& law,
                                                 const Vector& r,
                                                 const Vector& u0, int trials) {
    if (trials < 1) throw DimensionMismatch("trials must be >= 1");
    require(u0.size() == r.size(), "u0 and r must have equal length");
    std::vector<TrialRecord> records;
    records.reserve(static_cast<size_t>(trials));
    Vector u = u0;
    for (int j = 0; j < trials; ++j) {
        Vector y;
        try {
            y = sim(u);
        } catch (NumericalBlowup& b) {
            throw NumericalBlowup(b.what(), j, b.sample);
        }
        Vector e = r - y;
        TrialRecord rec;
        rec.trial = j;
        rec.u = u;
        rec.y = std::move(y);
        rec.e_norm = e.norm();
        rec.e = std::move(e);
        u = ilc_update(law, rec.u, rec.e);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TrialRecord> run_isolated_ilc(const LiftedPlant& plant,
                                          const AgentLaw& law, const Vector& r,
                                          const Vector& u0, int trials) {
    return run_isolated_ilc_custom(
        [&plant](const Vector& u) { return simulate_trial(plant, u); }, law, r,
        u0, trials);
}

} // namespace cilc
