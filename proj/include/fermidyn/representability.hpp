// representability.hpp — Unitality constraints, hole co-propagation and trajectory audits
//
// A linear generator keeps particle and hole RDMs complementary iff 𝓛(𝟙) = 0.
// The per-channel form reported here keeps only the ω = ω′ rates,
//     Σ_ω γ(ω,ω) [A_ω, A_ω†],
// while the direct residual 𝒟(𝟙) also carries the cross-frequency terms.

#pragma once

#include "fermidyn/generators.hpp"
#include "fermidyn/propagate.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fermidyn {

struct ChannelConstraint {
    int op{0};
    double omega{0.0};          // ω for RME/ULE, member frequency for UME
    double center{0.0};         // ω̄ (UME), else ω
    double rate{0.0};           // γ(ω,ω), γ(ω̄) or |γ̂(ω)|²
    double mirror_rate{0.0};    // the same at −ω; NaN when −ω is not a channel
    double asymmetry{0.0};      // rate − mirror_rate
    Matrix contribution;        // rate · [A_ω, A_ω†]
};

struct ConstraintReport {
    Matrix residual_matrix;
    double residual_norm{0.0};
    std::vector<ChannelConstraint> per_channel;
    bool satisfied{false};
    Matrix direct_residual;     // 𝒟(𝟙)
    double direct_norm{0.0};
    double tolerance{1e-10};
};

// Unblocked generators only; blocked ones satisfy the constraint by construction
// and raise UnsupportedOperation here.
ConstraintReport constraint_residual(const GeneratorSpec& spec, double tol = 1e-10);

// ‖𝓛(χ𝟙)‖_max
double unitality_residual(const GeneratorSpec& spec, const Matrix& h_s);

std::string constraint_report_text(const ConstraintReport& report);
std::string constraint_table_csv(const ConstraintReport& report);

struct HoleTrajectory {
    Trajectory holes;
    std::vector<double> defect;   // ‖q(t) − (χ𝟙 − ρ(t))‖_max per recorded time
    double max_defect{0.0};
};

// Evolves q under q ↦ 𝓛(χ𝟙) − 𝓛(χ𝟙 − q): the same linear map as the particle for
// unblocked generators, the exact particle–hole conjugate for blocked ones. The
// particle trajectory fixes the output times and the reference χ𝟙 − ρ(t).
HoleTrajectory copropagate_hole(const Matrix& q0, const GeneratorSpec& spec, const Matrix& h_s,
                                const Trajectory& particle, const IntegratorOptions& options = {});

struct AuditSummary {
    double min_eigenvalue{0.0};
    double max_eigenvalue{0.0};
    double max_trace_drift{0.0};
    double max_hermiticity_defect{0.0};
    std::optional<double> first_violation_time;
    std::size_t violating_steps{0};
    double chi{1.0};
    double tolerance{1e-6};

    bool violation() const noexcept { return first_violation_time.has_value(); }
};

// Flags eigenvalues outside [−tol, χ + tol].
AuditSummary audit_trajectory(const Trajectory& traj, double chi, double tol = 1e-6);

std::string audit_summary_text(const AuditSummary& summary);

}  // namespace fermidyn
