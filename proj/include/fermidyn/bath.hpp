// bath.hpp — Bosonic bath with a Drude-Lorentz spectral density
//
// Spectral functions of the bath autocorrelation function:
//   Γ̂(ω)  full Fourier transform (ULE): J(ω)(N(ω)+1) for ω>0, J(−ω)N(−ω) for ω<0
//   Γ(ω)  one-sided transform (RME/UME): π·Γ̂(ω) + i·ξ(ω), ξ a principal-value integral
// Energies in Hartree, temperature in Kelvin, ħ = 1.

#pragma once

#include "fermidyn/rdm.hpp"

#include <complex>

namespace fermidyn {

// CODATA 2018, Hartree per Kelvin.
inline constexpr double kBoltzmann = 3.166811563e-6;

struct BathModel {
    double lambda{0.01};        // Drude-Lorentz width, Eh
    double temperature{0.0};    // K
    double k_b{kBoltzmann};     // Eh/K
    double pv_cutoff{1.0};      // split between the panel region and the mapped tail, Eh
    int pv_points{24};          // Gauss nodes per panel

    double thermal_energy() const noexcept { return k_b * temperature; }

    // Throws DomainError on λ ≤ 0, T < 0, or too few nodes.
    void validate() const;

    // pv_cutoff ≥ 50·max(λ, |ω|); throws DomainError otherwise.
    void require_cutoff_covers(double omega) const;
};

// Cutoff set to 100·max(λ, max|ω|, k_B·T).
BathModel make_bath(double lambda, double temperature, double max_abs_frequency,
                    int pv_points = 24);

struct SpectralSample {
    double omega{0.0};
    double gamma_real{0.0};     // decay part
    double lamb_shift{0.0};     // imaginary part of Γ
};

// J(ω) = ωλ²/(ω²+λ²), odd in ω.
double drude_lorentz(double omega, double lambda);

// 1/(exp(ω/k_BT) − 1) for ω > 0; 0 at T = 0; underflows to 0 at large βω.
double bose_einstein(double omega, double temperature, double k_b = kBoltzmann);

// log N(ω); −∞ at T = 0. Finite where N itself underflows.
double log_bose_einstein(double omega, double temperature, double k_b = kBoltzmann);

// Γ̂(ω). Continuous through ω = 0 where it equals k_B·T.
double spectral_function_ule(double omega, const BathModel& bath);

// log Γ̂(ω); usable for detailed-balance checks where Γ̂(−ω) underflows.
double log_spectral_function_ule(double omega, const BathModel& bath);

// ξ_im(ω₀) = 𝒫∫₀^∞ dω J(ω)[N(ω)/(ω₀+ω) + (N(ω)+1)/(ω₀−ω)].
double xi_integral(double omega0, const BathModel& bath);

// Γ(ω₀) = π·Γ̂(ω₀) + i·ξ_im(ω₀).
cplx spectral_function_redfield(double omega0, const BathModel& bath);

// γ(ω,ω′) = Γ(ω) + Γ*(ω′)
cplx rme_rate(cplx gamma_omega, cplx gamma_omega_prime);
cplx rme_rate(double omega, double omega_prime, const BathModel& bath);

// S(ω,ω′) = (Γ(ω) − Γ*(ω′)) / 2i
cplx rme_lamb(cplx gamma_omega, cplx gamma_omega_prime);
cplx rme_lamb(double omega, double omega_prime, const BathModel& bath);

// γ̂(ω) = √(2π Γ̂(ω))
double ule_rate(double omega, const BathModel& bath);

// Ŝ(ω_ml, ω_ln) = −2π 𝒫∫ dω ω⁻¹ √(Γ̂(ω−ω_ml) Γ̂(ω+ω_ln))
double ule_lamb_coefficient(double omega_ml, double omega_ln, const BathModel& bath);

SpectralSample sample_redfield(double omega, const BathModel& bath);

}  // namespace fermidyn
