// bath.cpp — Spectral functions, principal-value integrals and Lamb-shift coefficients

#include "fermidyn/bath.hpp"

#include "fermidyn/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fermidyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kConvergence = 1e-6;
// n-vs-2n changes are measured against max(|I|, 1e-4·λ)
constexpr double kFloorPerLambda = 1e-4;

// N(ω)+1 = 1/(1 − e^{−βω}) for ω > 0.
double emission_factor(double omega, double kt) {
    if (kt <= 0.0) {
        return 1.0;
    }
    return -1.0 / std::expm1(-omega / kt);
}

double absorption_factor(double omega, double kt) {
    if (kt <= 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(omega / kt);
}

// log(e^y − 1) for y > 0 without overflow.
double log_expm1(double y) {
    if (y > 30.0) {
        return y + std::log1p(-std::exp(-y));
    }
    return std::log(std::expm1(y));
}

}  // namespace

// --------------------------------------------------------------- BathModel

void BathModel::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("BathModel: lambda must be positive and finite");
    }
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw DomainError("BathModel: temperature must be nonnegative and finite");
    }
    if (!(k_b > 0.0)) {
        throw DomainError("BathModel: Boltzmann constant must be positive");
    }
    if (pv_points < 4) {
        throw DomainError("BathModel: pv_points must be at least 4");
    }
    require_cutoff_covers(0.0);
}

void BathModel::require_cutoff_covers(double omega) const {
    const double need = 50.0 * std::max(lambda, std::abs(omega));
    if (!(pv_cutoff >= need) || !std::isfinite(pv_cutoff)) {
        std::ostringstream os;
        os << "BathModel: pv_cutoff " << pv_cutoff << " Eh is below 50*max(lambda, |omega|) = "
           << need << " Eh";
        throw DomainError(os.str());
    }
}

BathModel make_bath(double lambda, double temperature, double max_abs_frequency, int pv_points) {
    BathModel bath;
    bath.lambda = lambda;
    bath.temperature = temperature;
    bath.pv_points = pv_points;
    bath.pv_cutoff =
        100.0 * std::max({lambda, std::abs(max_abs_frequency), bath.thermal_energy()});
    bath.validate();
    return bath;
}

// -------------------------------------------------------- densities, occupancy

double drude_lorentz(double omega, double lambda) {
    if (!(lambda > 0.0)) {
        throw DomainError("drude_lorentz: lambda must be positive");
    }
    const double l2 = lambda * lambda;
    return omega * l2 / (omega * omega + l2);
}

double bose_einstein(double omega, double temperature, double k_b) {
    if (!(omega > 0.0)) {
        throw DomainError("bose_einstein: omega must be strictly positive");
    }
    if (temperature < 0.0) {
        throw DomainError("bose_einstein: temperature must be nonnegative");
    }
    return absorption_factor(omega, k_b * temperature);
}

double log_bose_einstein(double omega, double temperature, double k_b) {
    if (!(omega > 0.0)) {
        throw DomainError("log_bose_einstein: omega must be strictly positive");
    }
    if (temperature < 0.0) {
        throw DomainError("log_bose_einstein: temperature must be nonnegative");
    }
    if (temperature == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return -log_expm1(omega / (k_b * temperature));
}

// ------------------------------------------------------------- ULE spectrum

double spectral_function_ule(double omega, const BathModel& bath) {
    const double kt = bath.thermal_energy();
    if (omega > 0.0) {
        return drude_lorentz(omega, bath.lambda) * emission_factor(omega, kt);
    }
    if (omega < 0.0) {
        return drude_lorentz(-omega, bath.lambda) * absorption_factor(-omega, kt);
    }
    // lim_{ω→0} J(ω)(N(ω)+1) = lim J(ω)/ω · k_BT = k_BT for Drude-Lorentz.
    return kt;
}

double log_spectral_function_ule(double omega, const BathModel& bath) {
    const double kt = bath.thermal_energy();
    if (omega > 0.0) {
        const double log_j = std::log(drude_lorentz(omega, bath.lambda));
        if (kt <= 0.0) {
            return log_j;
        }
        return log_j - std::log(-std::expm1(-omega / kt));
    }
    if (omega < 0.0) {
        if (kt <= 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        return std::log(drude_lorentz(-omega, bath.lambda)) - log_expm1(-omega / kt);
    }
    return kt > 0.0 ? std::log(kt) : -std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------- principal-value terms

double xi_integral(double omega0, const BathModel& bath) {
    bath.validate();
    bath.require_cutoff_covers(omega0);
    const double lambda = bath.lambda;
    const double kt = bath.thermal_energy();
    const double cutoff = bath.pv_cutoff;

    auto absorb = [&](double w) { return drude_lorentz(w, lambda) * absorption_factor(w, kt); };
    auto emit = [&](double w) { return drude_lorentz(w, lambda) * emission_factor(w, kt); };
    auto full = [&](double w) { return absorb(w) / (omega0 + w) + emit(w) / (omega0 - w); };
    // finest panel resolves the scale |ω₀|
    quad::GradedMesh mesh;
    mesh.smallest_fraction = std::min(mesh.smallest_fraction, 1e-3 * std::abs(omega0) / cutoff);

    std::function<double(int)> rule;
    if (omega0 == 0.0) {
        // The N terms cancel: J·[N − (N+1)]/ω = −J(ω)/ω.
        auto f = [&](double w) { return -drude_lorentz(w, lambda) / w; };
        rule = [=](int n) {
            return quad::integrate(f, 0.0, cutoff, {}, n) +
                   quad::integrate_to_infinity(f, cutoff, n);
        };
    } else if (omega0 > 0.0) {
        const double s = omega0;
        const double g_s = emit(s);
        const double log_term = g_s * std::log(s / (cutoff - s));
        auto f = [=](double w) {
            const double q = w == s ? 0.0 : (emit(w) - g_s) / (s - w);
            return absorb(w) / (omega0 + w) + q;
        };
        rule = [=](int n) {
            const std::array<double, 1> bp{s};
            return quad::integrate(f, 0.0, cutoff, bp, n, mesh) + log_term +
                   quad::integrate_to_infinity(full, cutoff, n);
        };
    } else {
        const double s = -omega0;
        const double g_s = absorb(s);
        const double log_term = -g_s * std::log(s / (cutoff - s));
        auto f = [=](double w) {
            const double q = w == s ? 0.0 : (absorb(w) - g_s) / (s - w);
            return -q + emit(w) / (omega0 - w);
        };
        rule = [=](int n) {
            const std::array<double, 1> bp{s};
            return quad::integrate(f, 0.0, cutoff, bp, n, mesh) + log_term +
                   quad::integrate_to_infinity(full, cutoff, n);
        };
    }
    return quad::refine_and_check(rule, bath.pv_points, kConvergence, kFloorPerLambda * lambda,
                                   "xi_integral")
        .value;
}

cplx spectral_function_redfield(double omega0, const BathModel& bath) {
    return {kPi * spectral_function_ule(omega0, bath), xi_integral(omega0, bath)};
}

SpectralSample sample_redfield(double omega, const BathModel& bath) {
    const cplx g = spectral_function_redfield(omega, bath);
    return {omega, g.real(), g.imag()};
}

cplx rme_rate(cplx gamma_omega, cplx gamma_omega_prime) {
    return gamma_omega + std::conj(gamma_omega_prime);
}

cplx rme_rate(double omega, double omega_prime, const BathModel& bath) {
    return rme_rate(spectral_function_redfield(omega, bath),
                    spectral_function_redfield(omega_prime, bath));
}

cplx rme_lamb(cplx gamma_omega, cplx gamma_omega_prime) {
    return (gamma_omega - std::conj(gamma_omega_prime)) / cplx(0.0, 2.0);
}

cplx rme_lamb(double omega, double omega_prime, const BathModel& bath) {
    return rme_lamb(spectral_function_redfield(omega, bath),
                    spectral_function_redfield(omega_prime, bath));
}

double ule_rate(double omega, const BathModel& bath) {
    const double g = spectral_function_ule(omega, bath);
    if (g < 0.0) {
        throw std::logic_error("ule_rate: negative spectral function");
    }
    return std::sqrt(2.0 * kPi * g);
}

double ule_lamb_coefficient(double omega_ml, double omega_ln, const BathModel& bath) {
    bath.validate();
    bath.require_cutoff_covers(std::max(std::abs(omega_ml), std::abs(omega_ln)));
    const double cutoff = bath.pv_cutoff;
    auto h = [&](double w) {
        const double prod =
            spectral_function_ule(w - omega_ml, bath) * spectral_function_ule(w + omega_ln, bath);
        return std::sqrt(std::max(prod, 0.0));
    };
    // 𝒫∫_{−∞}^{∞} h(ω)/ω dω = ∫_0^∞ (h(ω) − h(−ω))/ω dω
    auto odd = [=](double w) { return (h(w) - h(-w)) / w; };
    const std::array<double, 2> bp{std::abs(omega_ml), std::abs(omega_ln)};
    auto rule = [=](int n) {
        return quad::integrate(odd, 0.0, cutoff, bp, n) +
               quad::integrate_to_infinity(odd, cutoff, n);
    };
    const double pv = quad::refine_and_check(rule, bath.pv_points, kConvergence,
                                             kFloorPerLambda * bath.lambda, "ule_lamb_coefficient")
                          .value;
    return -2.0 * kPi * pv;
}

}  // namespace fermidyn
