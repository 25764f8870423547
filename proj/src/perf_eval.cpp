#include "cilc/perf_eval.hpp"

#include <cmath>

namespace cilc {

namespace {

void check_pair(const Matrix& omega, const Matrix& psi) {
    if (omega.rows() != omega.cols() || psi.rows() != psi.cols() ||
        omega.rows() != psi.rows()) {
        throw DimensionMismatch("Omega and Psi must be square and equal-sized");
    }
}

void check_family(const std::vector<Matrix>& omegas,
                  const std::vector<Matrix>& psis) {
    if (omegas.empty() || omegas.size() != psis.size())
        throw DimensionMismatch("need one (Omega, Psi) pair per agent");
    for (size_t m = 0; m < omegas.size(); ++m) {
        check_pair(omegas[m], psis[m]);
        if (omegas[m].rows() != omegas.front().rows())
            throw DimensionMismatch("agents disagree on the horizon");
    }
}

} // namespace

Vector isolated_error_closed_form(const Matrix& omega, const Matrix& psi,
                                  const Vector& e0, const Vector& rd, int j) {
    check_pair(omega, psi);
    if (e0.size() != omega.rows() || rd.size() != omega.rows())
        throw DimensionMismatch("vector lengths must match Omega");
    if (j < 0) throw DimensionMismatch("trial index must be >= 0");
    Matrix a = Matrix::Identity(omega.rows(), omega.cols()); // Omega^j
    Matrix b = Matrix::Zero(omega.rows(), omega.cols());     // sum term
    for (int k = 0; k < j; ++k) {
        a = omega * a;
        b = omega * b + psi;
    }
    return a * e0 + b * rd;
}

Vector cilc_error_closed_form(const std::vector<Matrix>& omegas,
                              const std::vector<Matrix>& psis,
                              const std::vector<int>& f, const Vector& e0,
                              const Vector& rd, int j) {
    check_family(omegas, psis);
    if (j < 0) throw DimensionMismatch("trial index must be >= 0");
    if (static_cast<int>(f.size()) < j + 1)
        throw SequenceTooShort("best-performer sequence shorter than j + 1");
    const Eigen::Index n = omegas.front().rows();
    Matrix a = Matrix::Identity(n, n);
    Matrix b = Matrix::Zero(n, n);
    for (int k = 1; k <= j; ++k) {
        const size_t m = static_cast<size_t>(f[static_cast<size_t>(k)] - 1);
        if (m >= omegas.size())
            throw DimensionMismatch("best-performer id out of range");
        a = omegas[m] * a;
        b = omegas[m] * b + psis[m];
    }
    return a * e0 + b * rd;
}

Vector collaborative_error_closed_form(const Matrix& omega_m,
                                       const Matrix& psi_m,
                                       const Matrix& A_bar_prev,
                                       const Matrix& B_bar_prev,
                                       const Vector& e0, const Vector& rd) {
    check_pair(omega_m, psi_m);
    if (A_bar_prev.rows() != omega_m.rows() ||
        B_bar_prev.rows() != omega_m.rows() || e0.size() != omega_m.rows() ||
        rd.size() != omega_m.rows()) {
        throw DimensionMismatch("propagator/vector sizes must match Omega");
    }
    return omega_m * (A_bar_prev * e0) +
           (psi_m * rd + omega_m * (B_bar_prev * rd));
}

Propagators predict_best_performers(const std::vector<Matrix>& omegas,
                                    const std::vector<Matrix>& psis,
                                    const Vector& e0, const Vector& rd,
                                    int horizon) {
    check_family(omegas, psis);
    if (horizon < 1) throw DimensionMismatch("horizon must be >= 1");
    const Eigen::Index n = omegas.front().rows();
    const size_t M = omegas.size();

    Propagators props;
    props.A_bar.reserve(static_cast<size_t>(horizon) + 1);
    props.B_bar.reserve(static_cast<size_t>(horizon) + 1);
    props.f.reserve(static_cast<size_t>(horizon) + 1);

    props.A_bar.push_back(Matrix::Identity(n, n));
    props.B_bar.push_back(Matrix::Zero(n, n));
    props.f.push_back(1); // all agents share e0: full tie, lowest id

    for (int j = 1; j <= horizon; ++j) {
        const Matrix& a_prev = props.A_bar.back();
        const Matrix& b_prev = props.B_bar.back();
        int best = 0;
        double best_cost = 0.0;
        for (size_t m = 0; m < M; ++m) {
            const Vector predicted = collaborative_error_closed_form(
                omegas[m], psis[m], a_prev, b_prev, e0, rd);
            const double cost = predicted.squaredNorm();
            if (best == 0 || cost < best_cost) {
                best = static_cast<int>(m) + 1;
                best_cost = cost;
            }
        }
        const size_t w = static_cast<size_t>(best - 1);
        props.A_bar.push_back(omegas[w] * a_prev);
        props.B_bar.push_back(omegas[w] * b_prev + psis[w]);
        props.f.push_back(best);
    }
    return props;
}

Matrix well_performing_scores(const Collective& collective, const Vector& e0,
                              const Vector& rd, int horizon) {
    if (horizon < 0) throw DimensionMismatch("horizon must be >= 0");
    const size_t M = collective.laws.size();
    const Eigen::Index n = collective.plant.N;
    if (e0.size() != n || rd.size() != n)
        throw DimensionMismatch("vector lengths must equal N");

    std::vector<Matrix> omegas;
    std::vector<Matrix> psis;
    omegas.reserve(M);
    psis.reserve(M);
    for (const auto& law : collective.laws) {
        omegas.push_back(contraction_matrix(collective.plant, law));
        psis.push_back(filter_matrix(collective.plant, law));
    }

    const Propagators props =
        horizon >= 1 ? predict_best_performers(omegas, psis, e0, rd, horizon)
                     : Propagators{{Matrix::Identity(n, n)},
                                   {Matrix::Zero(n, n)},
                                   {1}};

    const bool zero_input_case = (e0 - rd).norm() == 0.0;

    // Per-agent isolated propagators, advanced alongside j.
    std::vector<Matrix> a_iso(M, Matrix::Identity(n, n));
    std::vector<Matrix> b_iso(M, Matrix::Zero(n, n));

    Matrix scores(horizon + 1, static_cast<Eigen::Index>(M));
    for (int j = 0; j <= horizon; ++j) {
        const Matrix& a_bar = props.A_bar[static_cast<size_t>(j)];
        const Matrix& b_bar = props.B_bar[static_cast<size_t>(j)];
        for (size_t m = 0; m < M; ++m) {
            if (j > 0) {
                a_iso[m] = omegas[m] * a_iso[m];
                b_iso[m] = omegas[m] * b_iso[m] + psis[m];
            }
            double f_score;
            if (zero_input_case) {
                // Single quadratic form in (r - d), the u0 = 0 special case.
                const Matrix form = a_bar.transpose() * a_bar -
                                    a_iso[m].transpose() * a_iso[m] +
                                    b_bar.transpose() * b_bar -
                                    b_iso[m].transpose() * b_iso[m] +
                                    2.0 * (b_bar.transpose() * a_bar) -
                                    2.0 * (b_iso[m].transpose() * a_iso[m]);
                f_score = rd.dot(form * rd);
            } else {
                f_score = e0.dot((a_bar.transpose() * a_bar -
                                  a_iso[m].transpose() * a_iso[m]) *
                                 e0) +
                          rd.dot((b_bar.transpose() * b_bar -
                                  b_iso[m].transpose() * b_iso[m]) *
                                 rd) +
                          2.0 * rd.dot((b_bar.transpose() * a_bar -
                                        b_iso[m].transpose() * a_iso[m]) *
                                       e0);
            }
            scores(j, static_cast<Eigen::Index>(m)) = f_score;
        }
    }
    return scores;
}

WellPerformingReport certify_well_performing(const Collective& collective,
                                             const Vector& e0, const Vector& rd,
                                             int horizon) {
    if (horizon < 1) throw DimensionMismatch("horizon must be >= 1");
    WellPerformingReport report;
    report.horizon = horizon;
    report.tolerance = 1e-12 * e0.squaredNorm();
    const Matrix scores = well_performing_scores(collective, e0, rd, horizon);
    for (int j = 0; j <= horizon; ++j) {
        for (Eigen::Index m = 0; m < scores.cols(); ++m) {
            if (scores(j, m) > report.tolerance) {
                report.certified = false;
                report.first_violation = {j, static_cast<int>(m) + 1};
                return report;
            }
        }
    }
    report.certified = true;
    return report;
}

} // namespace cilc
