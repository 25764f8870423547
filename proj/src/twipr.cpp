#include "cilc/twipr.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "json.hpp"

namespace cilc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegPerRad = 180.0 / kPi;

void check_params(const TwiprParams& p) {
    const double fields[] = {p.body_mass,     p.wheel_mass,    p.body_inertia,
                             p.wheel_inertia, p.com_distance,  p.wheel_radius,
                             p.gravity,       p.viscous_friction,
                             p.sample_period, p.inertia_scale};
    for (double f : fields) {
        if (!(f > 0.0))
            throw ConfigError("all TWIPR parameters must be strictly positive");
    }
}

Matrix expm(const Matrix& M) {
    const Eigen::Index n = M.rows();
    double norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        norm = std::max(norm, M.row(i).cwiseAbs().sum());
    int squarings = 0;
    Matrix scaled = M;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        scaled /= std::pow(2.0, squarings);
    }
    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 64; ++k) {
        term = term * scaled / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() <
            1e-16 * result.cwiseAbs().maxCoeff()) {
            break;
        }
    }
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

// Real coefficients of prod (x - p_i), lowest order first, constant term
// excluded from the returned array layout: coeffs[k] multiplies x^k.
std::array<double, 5> characteristic_coefficients(
    const std::array<std::complex<double>, 4>& poles) {
    std::array<std::complex<double>, 5> c{};
    c[0] = 1.0; // polynomial "1", degree 0
    int degree = 0;
    for (const auto& p : poles) {
        for (int k = degree + 1; k >= 1; --k) c[k] = c[k - 1] - p * c[k];
        c[0] = -p * c[0];
        ++degree;
    }
    std::array<double, 5> real{};
    for (int k = 0; k <= 4; ++k) {
        if (std::abs(c[k].imag()) > 1e-9 * (1.0 + std::abs(c[k].real())))
            throw BadPoleSet("pole set is not closed under conjugation");
        real[k] = c[k].real();
    }
    return real;
}

} // namespace

Eigen::Vector4d twipr_dynamics(const Eigen::Vector4d& z, double u,
                               const TwiprParams& p) {
    const double theta = z(0);
    const double theta_dot = z(1);
    const double s_dot = z(3);

    const double mb = p.body_mass;
    const double l = p.com_distance;
    const double r = p.wheel_radius;
    const double ib = p.body_inertia * p.inertia_scale;
    const double iw = p.wheel_inertia * p.inertia_scale;
    const double c = p.viscous_friction;
    const double mt = mb + p.wheel_mass + iw / (r * r);

    const double sin_t = std::sin(theta);
    const double cos_t = std::cos(theta);
    const double rel = s_dot / r - theta_dot; // wheel-body relative rate

    Eigen::Matrix2d mass;
    mass << mt, mb * l * cos_t, mb * l * cos_t, ib;
    Eigen::Vector2d force;
    force << mb * l * theta_dot * theta_dot * sin_t + u / r - (c / r) * rel,
        mb * p.gravity * l * sin_t - u + c * rel;
    const Eigen::Vector2d accel = mass.inverse() * force; // (s'', theta'')

    Eigen::Vector4d dz;
    dz << theta_dot, accel(1), s_dot, accel(0);
    return dz;
}

Linearization linearize_upright(const TwiprParams& p) {
    const double mb = p.body_mass;
    const double l = p.com_distance;
    const double r = p.wheel_radius;
    const double g = p.gravity;
    const double ib = p.body_inertia * p.inertia_scale;
    const double iw = p.wheel_inertia * p.inertia_scale;
    const double c = p.viscous_friction;
    const double mt = mb + p.wheel_mass + iw / (r * r);
    const double det = mt * ib - mb * mb * l * l;

    Linearization lin;
    lin.A.setZero();
    lin.B.setZero();
    lin.A(0, 1) = 1.0;
    lin.A(2, 3) = 1.0;
    // theta'' row
    lin.A(1, 0) = mt * mb * g * l / det;
    lin.A(1, 1) = -c * (mb * l / r + mt) / det;
    lin.A(1, 3) = c * (mb * l / (r * r) + mt / r) / det;
    lin.B(1) = -(mb * l / r + mt) / det;
    // s'' row
    lin.A(3, 0) = -mb * mb * g * l * l / det;
    lin.A(3, 1) = c * (ib / r + mb * l) / det;
    lin.A(3, 3) = -c * (ib / (r * r) + mb * l / r) / det;
    lin.B(3) = (ib / r + mb * l) / det;
    return lin;
}

std::pair<Matrix, Matrix> discretize_zoh(const Matrix& A_c, const Matrix& B_c,
                                         double T) {
    if (A_c.rows() != A_c.cols() || B_c.rows() != A_c.rows())
        throw DimensionMismatch("A must be square with matching B");
    if (!(T > 0.0)) throw DimensionMismatch("sampling period must be positive");
    const Eigen::Index n = A_c.rows();
    const Eigen::Index m = B_c.cols();
    Matrix aug = Matrix::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = A_c * T;
    aug.topRightCorner(n, m) = B_c * T;
    const Matrix e = expm(aug);
    return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

std::array<std::complex<double>, 4> default_poles() {
    return {std::complex<double>(0.90, 0.0), std::complex<double>(0.92, 0.0),
            std::complex<double>(0.94, 0.0), std::complex<double>(0.96, 0.0)};
}

Eigen::RowVector4d design_feedback(const Eigen::Matrix4d& A,
                                   const Eigen::Vector4d& B,
                                   const std::array<std::complex<double>, 4>& poles) {
    const auto coeffs = characteristic_coefficients(poles);

    Eigen::Matrix4d ctrl;
    Eigen::Vector4d col = B;
    for (int k = 0; k < 4; ++k) {
        ctrl.col(k) = col;
        col = A * col;
    }
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(ctrl, Eigen::ComputeFullU |
                                                    Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(3) > 1e-10 * sv(0)))
        throw Uncontrollable("(A, B) is not controllable");

    // Ackermann: K = [0 0 0 1] C^-1 q(A).
    Eigen::Matrix4d q = Eigen::Matrix4d::Identity() * coeffs[0];
    Eigen::Matrix4d power = A;
    for (int k = 1; k <= 4; ++k) {
        q += coeffs[k] * power;
        power = power * A;
    }
    const Eigen::RowVector4d last =
        Eigen::RowVector4d::Unit(3) * ctrl.inverse();
    return last * q;
}

DiscreteClosedLoop make_closed_loop(const TwiprParams& p,
                                    const std::array<std::complex<double>, 4>& poles) {
    check_params(p);
    const Linearization lin = linearize_upright(p);

    // Similarity rescale so the pitch states read in degrees and
    // C = (1, 0, 0, 0) emits the tracked output directly.
    Eigen::Vector4d scale(kDegPerRad, kDegPerRad, 1.0, 1.0);
    const Eigen::Matrix4d A_deg = scale.asDiagonal() * lin.A *
                                  scale.cwiseInverse().asDiagonal();
    const Eigen::Vector4d B_deg = scale.asDiagonal() * lin.B;

    auto [A, B] = discretize_zoh(A_deg, B_deg, p.sample_period);
    DiscreteClosedLoop loop;
    loop.A = A;
    loop.B = B;
    loop.C = Eigen::RowVector4d::Unit(0);
    loop.K = design_feedback(loop.A, loop.B, poles);
    loop.T = p.sample_period;

    const double rho = spectral_radius(loop.A - loop.B * loop.K);
    if (!(rho < 1.0))
        throw BadPoleSet("requested pole set does not stabilize the loop");
    return loop;
}

LiftedPlant markov_lifted_plant(const DiscreteClosedLoop& loop, int N,
                                const Eigen::Vector4d& z0,
                                double constant_disturbance) {
    if (N < 1) throw DimensionMismatch("horizon must be >= 1");
    const Eigen::Matrix4d A_cl = loop.A - loop.B * loop.K;

    Vector markov(N);
    Vector d(N);
    Eigen::Vector4d impulse = loop.B; // A_cl^(i-1) B
    Eigen::Vector4d free = z0;
    for (int i = 0; i < N; ++i) {
        markov(i) = loop.C * impulse;
        impulse = A_cl * impulse;
        free = A_cl * free; // output sample i is y(i+1)
        d(i) = loop.C * free + constant_disturbance;
    }

    Matrix P = Matrix::Zero(N, N);
    for (int col = 0; col < N; ++col)
        for (int row = col; row < N; ++row) P(row, col) = markov(row - col);
    return make_lifted_plant(P, d);
}

Vector reference_maneuver(int N, double T) {
    if (N < 1) throw DimensionMismatch("horizon must be >= 1");
    Vector r(N);
    for (int n = 0; n < N; ++n) r(n) = 30.0 * std::sin(kPi * T * n);
    return r;
}

Vector simulate_nonlinear_trial(const TwiprParams& p,
                                const Eigen::RowVector4d& K,
                                const Vector& u_ilc, double T,
                                double blowup_guard_deg) {
    check_params(p);
    const int N = static_cast<int>(u_ilc.size());
    if (N < 1) throw DimensionMismatch("empty input trajectory");
    const double h = T / 10.0;
    const Eigen::Vector4d scale(kDegPerRad, kDegPerRad, 1.0, 1.0);

    Eigen::Vector4d z = Eigen::Vector4d::Zero();
    Vector y(N);
    for (int n = 0; n < N; ++n) {
        const double u = -K.dot(scale.cwiseProduct(z)) + u_ilc(n);
        for (int i = 0; i < 10; ++i) {
            const Eigen::Vector4d k1 = twipr_dynamics(z, u, p);
            const Eigen::Vector4d k2 = twipr_dynamics(z + 0.5 * h * k1, u, p);
            const Eigen::Vector4d k3 = twipr_dynamics(z + 0.5 * h * k2, u, p);
            const Eigen::Vector4d k4 = twipr_dynamics(z + h * k3, u, p);
            z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double pitch_deg = z(0) * kDegPerRad;
            if (!std::isfinite(pitch_deg) ||
                std::abs(pitch_deg) > blowup_guard_deg) {
                throw NumericalBlowup("pitch left the safe envelope", -1, n);
            }
        }
        y(n) = z(0) * kDegPerRad;
    }
    return y;
}

TwiprConfig load_twipr_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open TWIPR parameter file: " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("TWIPR parameter file: ") + e.what());
    }
    if (j.value("schema_version", 0) != 1)
        throw ConfigError("TWIPR parameter file: schema_version must be 1");

    TwiprConfig cfg;
    const auto get = [&j](const char* key, double fallback) {
        return j.contains(key) ? j.at(key).get<double>() : fallback;
    };
    cfg.params.body_mass = get("body_mass_kg", cfg.params.body_mass);
    cfg.params.wheel_mass = get("wheel_mass_kg", cfg.params.wheel_mass);
    cfg.params.body_inertia = get("body_inertia_kgm2", cfg.params.body_inertia);
    cfg.params.wheel_inertia = get("wheel_inertia_kgm2", cfg.params.wheel_inertia);
    cfg.params.com_distance = get("com_distance_m", cfg.params.com_distance);
    cfg.params.wheel_radius = get("wheel_radius_m", cfg.params.wheel_radius);
    cfg.params.gravity = get("gravity_mps2", cfg.params.gravity);
    cfg.params.viscous_friction =
        get("viscous_friction_nms", cfg.params.viscous_friction);
    cfg.params.sample_period = get("sample_period_s", cfg.params.sample_period);
    cfg.params.inertia_scale = get("inertia_scale", cfg.params.inertia_scale);
    check_params(cfg.params);

    if (j.contains("poles")) {
        const auto& poles = j.at("poles");
        if (!poles.is_array() || poles.size() != 4)
            throw ConfigError("poles: expected an array of 4 entries");
        for (size_t k = 0; k < 4; ++k) {
            const auto& e = poles[k];
            if (e.is_number()) {
                cfg.poles[k] = std::complex<double>(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2) {
                cfg.poles[k] = std::complex<double>(e[0].get<double>(),
                                                    e[1].get<double>());
            } else {
                throw ConfigError("poles: entries must be reals or [re, im]");
            }
        }
    }
    return cfg;
}

void save_twipr_config(const TwiprConfig& cfg,
                       const std::filesystem::path& file) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["body_mass_kg"] = cfg.params.body_mass;
    j["wheel_mass_kg"] = cfg.params.wheel_mass;
    j["body_inertia_kgm2"] = cfg.params.body_inertia;
    j["wheel_inertia_kgm2"] = cfg.params.wheel_inertia;
    j["com_distance_m"] = cfg.params.com_distance;
    j["wheel_radius_m"] = cfg.params.wheel_radius;
    j["gravity_mps2"] = cfg.params.gravity;
    j["viscous_friction_nms"] = cfg.params.viscous_friction;
    j["sample_period_s"] = cfg.params.sample_period;
    j["inertia_scale"] = cfg.params.inertia_scale;
    nlohmann::json poles = nlohmann::json::array();
    for (const auto& p : cfg.poles) {
        if (p.imag() == 0.0) {
            poles.push_back(p.real());
        } else {
            poles.push_back({p.real(), p.imag()});
        }
    }
    j["poles"] = poles;
    std::ofstream out(file);
    out << j.dump(2) << '\n';
}

} // namespace cilc
