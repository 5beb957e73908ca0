// representability.cpp — Constraint residuals, hole co-propagation, audits

#include "fermidyn/representability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fermidyn {

ConstraintReport constraint_residual(const GeneratorSpec& spec, double tol) {
    if (spec.pauli_blocked()) {
        throw UnsupportedOperation(
            "constraint_residual: Pauli-blocked generators satisfy the constraint by construction");
    }
    const Eigen::Index d = spec.dim();
    ConstraintReport rep;
    rep.tolerance = tol;
    rep.residual_matrix = Matrix::Zero(d, d);
    const auto& flat = spec.flat_channels();
    const double wtol = spec.spectrum().degeneracy_tol();

    for (const auto& fc : flat) {
        ChannelConstraint cc;
        cc.op = fc.op;
        cc.omega = fc.omega;
        cc.center = fc.omega;
        if (spec.clusters() && fc.cluster >= 0) {
            cc.center = spec.clusters()->clusters[static_cast<std::size_t>(fc.cluster)].center;
        }
        cc.rate = spec.diagonal_rate(fc);
        cc.mirror_rate = std::numeric_limits<double>::quiet_NaN();
        for (const auto& other : flat) {
            if (other.op == fc.op && std::abs(other.omega + fc.omega) <= wtol) {
                cc.mirror_rate = spec.diagonal_rate(other);
            }
        }
        cc.asymmetry = cc.rate - cc.mirror_rate;
        const Matrix& a = spec.channel_op(fc);
        cc.contribution = cc.rate * commutator(a, a.adjoint());
        rep.residual_matrix += cc.contribution;
        rep.per_channel.push_back(std::move(cc));
    }
    rep.residual_norm = max_abs(rep.residual_matrix);
    rep.satisfied = rep.residual_norm < tol;
    rep.direct_residual = dissipator(Matrix::Identity(d, d), spec);
    rep.direct_norm = max_abs(rep.direct_residual);
    return rep;
}

double unitality_residual(const GeneratorSpec& spec, const Matrix& h_s) {
    const Eigen::Index d = spec.dim();
    return max_abs(liouvillian_action(spec.chi() * Matrix::Identity(d, d), h_s, spec));
}

std::string constraint_report_text(const ConstraintReport& r) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "residual_norm = " << r.residual_norm << '\n';
    os << "direct_norm = " << r.direct_norm << '\n';
    os << "cross_frequency_part = " << max_abs(r.direct_residual - r.residual_matrix) << '\n';
    os << "tolerance = " << r.tolerance << '\n';
    os << "satisfied = " << (r.satisfied ? "true" : "false") << '\n';
    os << "channels = " << r.per_channel.size() << '\n';
    return os.str();
}

std::string constraint_table_csv(const ConstraintReport& r) {
    std::ostringstream os;
    os << "# fermidyn-constraint/1\n";
    os << "operator,omega,center,rate,mirror_rate,asymmetry,contribution_max\n";
    os << std::setprecision(12);
    for (const auto& c : r.per_channel) {
        os << c.op << ',' << c.omega << ',' << c.center << ',' << c.rate << ',' << c.mirror_rate
           << ',' << c.asymmetry << ',' << max_abs(c.contribution) << '\n';
    }
    return os.str();
}

HoleTrajectory copropagate_hole(const Matrix& q0, const GeneratorSpec& spec, const Matrix& h_s,
                                const Trajectory& particle, const IntegratorOptions& options) {
    if (particle.empty()) {
        throw std::invalid_argument("copropagate_hole: empty particle trajectory");
    }
    const Eigen::Index d = spec.dim();
    if (q0.rows() != d || q0.cols() != d) {
        throw DimensionError("copropagate_hole: hole RDM dimension mismatch");
    }
    const Matrix full = spec.chi() * Matrix::Identity(d, d);
    const CompiledGenerator gen(h_s, spec);
    const Matrix l_full = gen(full);
    auto rhs = [&](const Matrix& q) -> Matrix { return l_full - gen(full - q); };

    HoleTrajectory out;
    out.holes = integrate(rhs, q0, particle.times, options);
    for (std::size_t k = 0; k < out.holes.size(); ++k) {
        const double defect = max_abs(out.holes.states[k] - (full - particle.states[k]));
        out.defect.push_back(defect);
        out.max_defect = std::max(out.max_defect, defect);
    }
    return out;
}

AuditSummary audit_trajectory(const Trajectory& traj, double chi, double tol) {
    AuditSummary s;
    s.chi = chi;
    s.tolerance = tol;
    if (traj.empty()) {
        return s;
    }
    s.min_eigenvalue = std::numeric_limits<double>::infinity();
    s.max_eigenvalue = -std::numeric_limits<double>::infinity();
    const double trace0 = traj.states.front().trace().real();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Matrix& rho = traj.states[k];
        const RealVector ev = hermitian_eigenvalues(rho);
        const double lo = ev.minCoeff();
        const double hi = ev.maxCoeff();
        s.min_eigenvalue = std::min(s.min_eigenvalue, lo);
        s.max_eigenvalue = std::max(s.max_eigenvalue, hi);
        s.max_trace_drift = std::max(s.max_trace_drift, std::abs(rho.trace().real() - trace0));
        s.max_hermiticity_defect = std::max(s.max_hermiticity_defect, hermiticity_defect(rho));
        if (lo < -tol || hi > chi + tol) {
            ++s.violating_steps;
            if (!s.first_violation_time) {
                s.first_violation_time = traj.times[k];
            }
        }
    }
    return s;
}

std::string audit_summary_text(const AuditSummary& s) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "min_eigenvalue = " << s.min_eigenvalue << '\n';
    os << "max_eigenvalue = " << s.max_eigenvalue << '\n';
    os << "chi = " << s.chi << '\n';
    os << "max_trace_drift = " << s.max_trace_drift << '\n';
    os << "max_hermiticity_defect = " << s.max_hermiticity_defect << '\n';
    os << "violation = " << (s.violation() ? "true" : "false") << '\n';
    if (s.first_violation_time) {
        os << "first_violation_time = " << *s.first_violation_time << '\n';
        os << "violating_steps = " << s.violating_steps << '\n';
    }
    return os.str();
}

}  // namespace fermidyn
