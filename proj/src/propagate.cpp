// propagate.cpp — Dormand–Prince 5(4) with PI step control, expm reference

#include "fermidyn/propagate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace fermidyn {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b − b̂ (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kAlpha = 0.17;   // PI controller exponents (Hairer)
constexpr double kBeta = 0.04;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double atol, double rtol) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < err.cols(); ++j) {
        for (Eigen::Index i = 0; i < err.rows(); ++i) {
            const double scale = atol + rtol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
            worst = std::max(worst, std::abs(err(i, j)) / scale);
        }
    }
    return worst;
}

double initial_step(const Rhs& f, const Matrix& y0, const Matrix& k1, double atol, double rtol,
                    std::size_t& evals) {
    auto scaled = [&](const Matrix& m) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            const double sc = atol + rtol * std::abs(y0(k));
            s = std::max(s, std::abs(m(k)) / sc);
        }
        return s;
    };
    const double d0 = scaled(y0);
    const double d1 = scaled(k1);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const Matrix y1 = y0 + h0 * k1;
    const Matrix k2 = f(y1);
    ++evals;
    const double d2 = scaled(k2 - k1) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min(100.0 * h0, h1);
}

}  // namespace

std::vector<double> output_grid(double t_end, double stride) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw DomainError("output_grid: t_end must be positive and finite");
    }
    if (!(stride > 0.0)) {
        throw DomainError("output_grid: stride must be positive");
    }
    std::vector<double> t{0.0};
    const auto n = static_cast<std::size_t>(std::floor(t_end / stride * (1.0 + 1e-12)));
    for (std::size_t k = 1; k <= n; ++k) {
        t.push_back(static_cast<double>(k) * stride);
    }
    if (t_end - t.back() > 1e-9 * t_end) {
        t.push_back(t_end);
    } else {
        t.back() = std::max(t.back(), t_end);
    }
    return t;
}

Trajectory integrate(const Rhs& f, const Matrix& rho0, std::span<const double> times,
                     const IntegratorOptions& opt) {
    if (times.empty()) {
        throw std::invalid_argument("integrate: no output times");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            throw std::invalid_argument("integrate: output times must be strictly increasing");
        }
    }
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }

    Trajectory traj;
    Matrix y = opt.rehermitize ? hermitize(rho0) : rho0;
    double t = times[0];
    traj.times.push_back(t);
    traj.states.push_back(y);
    if (times.size() == 1) {
        return traj;
    }

    Matrix k1 = f(y);
    ++traj.stats.evaluations;
    double h_free = opt.initial_step > 0.0
                        ? opt.initial_step
                        : initial_step(f, y, k1, opt.atol, opt.rtol, traj.stats.evaluations);
    double err_prev = 1e-4;
    bool last_rejected = false;

    Matrix k2, k3, k4, k5, k6, k7, y_new, err;
    std::size_t next = 1;
    std::size_t steps = 0;
    std::size_t physicality_rejections = 0;
    std::string physicality_error;   // last stage failure since the last accepted step
    auto left_region = [&](const std::string& cause) {
        std::ostringstream os;
        os << "integrate: state left the physical region near t = " << t << " (" << cause << ")";
        return PhysicalityError(os.str());
    };
    while (next < times.size()) {
        const double target = times[next];
        const double h_min = opt.min_step_fraction * std::max(std::abs(t), 1.0);
        double h = opt.max_step > 0.0 ? std::min(h_free, opt.max_step) : h_free;
        bool lands = false;
        if (t + h >= target - 1e-12 * std::max(std::abs(target), 1.0)) {
            h = target - t;
            lands = true;
            if (h < h_min) {
                // Already at the output time up to rounding.
                t = target;
                traj.times.push_back(t);
                traj.states.push_back(y);
                ++next;
                continue;
            }
        }
        if (h < h_min) {
            if (!physicality_error.empty()) {
                throw left_region(physicality_error);
            }
            std::ostringstream os;
            os << "integrate: step size " << h << " underflowed at t = " << t
               << "; the generator may be stiff at this time scale (an interaction-picture "
                  "formulation is not available)";
            throw StiffnessError(os.str());
        }
        if (++steps > opt.max_steps) {
            throw StiffnessError("integrate: step budget exhausted at t = " + std::to_string(t));
        }

        bool stage_failed = false;
        std::string stage_error;
        try {
            k2 = f(y + h * (a21 * k1));
            k3 = f(y + h * (a31 * k1 + a32 * k2));
            k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = f(y_new);
            traj.stats.evaluations += 6;
        } catch (const PhysicalityError& e) {
            stage_failed = true;
            stage_error = e.what();
        }
        if (stage_failed) {
            if (++physicality_rejections > opt.max_physicality_rejections) {
                throw left_region(stage_error);
            }
            physicality_error = stage_error;
            ++traj.stats.rejected;
            h_free = 0.5 * h;
            last_rejected = true;
            continue;
        }

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, y_new, opt.atol, opt.rtol);
        if (!std::isfinite(en)) {
            ++traj.stats.rejected;
            h_free = kMinFactor * h;
            last_rejected = true;
            continue;
        }
        if (en <= 1.0) {
            ++traj.stats.accepted;
            physicality_error.clear();
            t = lands ? target : t + h;
            if (opt.rehermitize) {
                // f preserves Hermiticity, so f(½(y + y†)) = ½(f(y) + f(y)†).
                y = hermitize(y_new);
                k1 = hermitize(k7);
            } else {
                y = y_new;
                k1 = k7;
            }
            if (lands) {
                traj.times.push_back(t);
                traj.states.push_back(y);
                ++next;
                physicality_rejections = 0;
            }
            double factor = en == 0.0 ? kMaxFactor
                                      : kSafety * std::pow(en, -kAlpha) * std::pow(err_prev, kBeta);
            factor = std::clamp(factor, kMinFactor, kMaxFactor);
            if (last_rejected) {
                factor = std::min(factor, 1.0);
            }
            // A shortened landing step does not invalidate the previous proposal.
            h_free = lands ? std::max(h_free * std::min(factor, 1.0), h * factor) : h * factor;
            err_prev = std::max(en, 1e-4);
            last_rejected = false;
        } else {
            ++traj.stats.rejected;
            h_free = h * std::max(kMinFactor, kSafety * std::pow(en, -kAlpha));
            last_rejected = true;
        }
    }
    return traj;
}

Trajectory propagate_expm(const Matrix& superoperator, const Matrix& rho0,
                          std::span<const double> times) {
    const Eigen::Index d = rho0.rows();
    if (superoperator.rows() != d * d || superoperator.cols() != d * d) {
        throw DimensionError("propagate_expm: superoperator does not match the state");
    }
    if (times.empty()) {
        throw std::invalid_argument("propagate_expm: no output times");
    }
    const Eigen::VectorXcd v0 = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
    Trajectory traj;
    for (double t : times) {
        const Matrix prop = (superoperator * cplx(t - times[0], 0.0)).exp();
        const Eigen::VectorXcd v = prop * v0;
        traj.times.push_back(t);
        traj.states.push_back(Eigen::Map<const Matrix>(v.data(), d, d));
    }
    return traj;
}

Matrix steady_state(const Matrix& superoperator, Eigen::Index dim, double trace) {
    if (superoperator.rows() != dim * dim || superoperator.cols() != dim * dim) {
        throw DimensionError("steady_state: superoperator does not match the dimension");
    }
    Eigen::BDCSVD<Matrix> svd(superoperator, Eigen::ComputeFullV);
    const Eigen::VectorXcd v = svd.matrixV().col(dim * dim - 1);
    Matrix rho = Eigen::Map<const Matrix>(v.data(), dim, dim);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-300) {
        throw std::runtime_error("steady_state: null vector has zero trace");
    }
    return hermitize(rho * (trace / tr));
}

}  // namespace fermidyn
