// run.cpp — Scenario execution, default schedule, CSV and metadata output

#include "fermidyn/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fermidyn {

using nlohmann::json;

GeneratorSpec build_generator(const Scenario& s, Execution exec) {
    GeneratorOptions opt = s.generator;
    opt.chi = s.chi;
    return GeneratorSpec::build(s.hamiltonian, s.coupling_operators, s.bath(), opt, exec);
}

double slowest_rate(const GeneratorSpec& spec) {
    double largest = 0.0;
    for (const auto& fc : spec.flat_channels()) {
        largest = std::max(largest, spec.diagonal_rate(fc));
    }
    if (!(largest > 0.0)) {
        return 0.0;
    }
    double slowest = largest;
    for (const auto& fc : spec.flat_channels()) {
        const double g = spec.diagonal_rate(fc);
        if (g >= 1e-8 * largest) {
            slowest = std::min(slowest, g);
        }
    }
    return slowest;
}

double default_t_end(const GeneratorSpec& spec) {
    const double g = slowest_rate(spec);
    if (!(g > 0.0)) {
        throw DomainError("default_t_end: no dissipative channel; set schedule.t_end explicitly");
    }
    return 20.0 / g;
}

RunResult run_scenario(const Scenario& s, Execution exec) {
    RunResult r{s, build_generator(s, exec)};
    const Matrix h = s.hamiltonian.matrix();
    if (s.schedule.t_end) {
        r.t_end = *s.schedule.t_end;
        r.t_end_source = "scenario";
    } else {
        r.t_end = default_t_end(r.spec);
        r.t_end_source = "20/Gamma_slowest";
    }
    r.output_stride = s.schedule.output_stride.value_or(r.t_end / kDefaultOutputPoints);
    const std::vector<double> times = output_grid(r.t_end, r.output_stride);

    const CompiledGenerator gen(h, r.spec);
    r.trajectory = integrate(gen, s.initial_state, times, s.schedule.integrator);
    r.audit = audit_trajectory(r.trajectory, s.chi);
    r.unitality = unitality_residual(r.spec, h);
    if (!r.spec.pauli_blocked()) {
        r.constraint = constraint_residual(r.spec);
    }
    if (s.schedule.copropagate_hole) {
        const Matrix q0 = s.chi * Matrix::Identity(h.rows(), h.cols()) - s.initial_state;
        r.hole = copropagate_hole(q0, r.spec, h, r.trajectory, s.schedule.integrator);
    }
    if (s.schedule.verify_expm && !r.spec.pauli_blocked()) {
        const Matrix l = superoperator_matrix(h, r.spec, exec);
        const Trajectory ref = propagate_expm(l, s.initial_state, times);
        double dev = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            const Matrix diff = s.hamiltonian.to_eigenbasis(ref.states[k] - r.trajectory.states[k]);
            dev = std::max(dev, diff.diagonal().cwiseAbs().maxCoeff());
        }
        r.expm_deviation = dev;
    }
    return r;
}

std::vector<RealVector> eigenbasis_populations(const RunResult& r) {
    std::vector<RealVector> out;
    out.reserve(r.trajectory.size());
    for (const auto& rho : r.trajectory.states) {
        out.push_back(r.scenario.hamiltonian.to_eigenbasis(rho).diagonal().real());
    }
    return out;
}

std::string trajectory_csv(const RunResult& r) {
    const auto& spectrum = r.spec.spectrum();
    const Eigen::Index d = r.spec.dim();
    std::ostringstream os;
    os << "# " << kTrajectoryFormat << " scenario=" << r.scenario.name
       << " me=" << to_string(r.spec.kind()) << " blocked=" << (r.spec.pauli_blocked() ? 1 : 0)
       << " chi=" << r.scenario.chi << "\n";
    os << "time";
    for (Eigen::Index j = 0; j < d; ++j) {
        os << ",n" << j;
    }
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        os << ",P" << k;
    }
    os << ",min_eig,max_eig,trace";
    if (r.hole) {
        os << ",hole_defect";
    }
    os << "\n";
    os << std::setprecision(15);
    const auto pops = eigenbasis_populations(r);
    for (std::size_t t = 0; t < r.trajectory.size(); ++t) {
        const Matrix& rho = r.trajectory.states[t];
        os << r.trajectory.times[t];
        for (Eigen::Index j = 0; j < d; ++j) {
            os << ',' << pops[t](j);
        }
        const RealVector sub = spectrum.subspace_populations(rho);
        for (Eigen::Index k = 0; k < sub.size(); ++k) {
            os << ',' << sub(k);
        }
        const RealVector ev = hermitian_eigenvalues(rho);
        os << ',' << ev.minCoeff() << ',' << ev.maxCoeff() << ',' << rho.trace().real();
        if (r.hole) {
            os << ',' << r.hole->defect[t];
        }
        os << '\n';
    }
    return os.str();
}

json run_metadata(const RunResult& r) {
    json m;
    m["format"] = kMetadataFormat;
    m["scenario"] = to_json(r.scenario);
    m["schedule"] = {{"t_end", r.t_end},
                     {"t_end_source", r.t_end_source},
                     {"output_stride", r.output_stride},
                     {"slowest_rate", slowest_rate(r.spec)},
                     {"recorded_times", r.trajectory.size()}};
    m["integrator"] = {{"accepted_steps", r.trajectory.stats.accepted},
                       {"rejected_steps", r.trajectory.stats.rejected},
                       {"evaluations", r.trajectory.stats.evaluations}};
    json audit;
    audit["min_eigenvalue"] = r.audit.min_eigenvalue;
    audit["max_eigenvalue"] = r.audit.max_eigenvalue;
    audit["max_trace_drift"] = r.audit.max_trace_drift;
    audit["max_hermiticity_defect"] = r.audit.max_hermiticity_defect;
    audit["violation"] = r.audit.violation();
    audit["first_violation_time"] =
        r.audit.first_violation_time ? json(*r.audit.first_violation_time) : json(nullptr);
    audit["tolerance"] = r.audit.tolerance;
    m["audit"] = audit;
    m["unitality_residual"] = r.unitality;
    if (r.constraint) {
        m["constraint"] = {{"residual_norm", r.constraint->residual_norm},
                           {"direct_norm", r.constraint->direct_norm},
                           {"satisfied", r.constraint->satisfied}};
    }
    if (r.hole) {
        m["hole"] = {{"max_defect", r.hole->max_defect}, {"final_defect", r.hole->defect.back()}};
    }
    if (r.expm_deviation) {
        m["expm_max_population_deviation"] = *r.expm_deviation;
    }
    const auto pops = eigenbasis_populations(r);
    m["final_populations"] = std::vector<double>(pops.back().data(), pops.back().data() + pops.back().size());
    return m;
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("FERMIDYN_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return std::filesystem::current_path();
}

WrittenFiles write_outputs(const RunResult& r, const std::filesystem::path& dir,
                           const std::string& stem) {
    std::filesystem::create_directories(dir);
    WrittenFiles out{dir / (stem + ".csv"), dir / (stem + ".meta.json")};
    std::ofstream csv(out.csv);
    std::ofstream meta(out.meta);
    if (!csv || !meta) {
        throw std::runtime_error("cannot write outputs under " + dir.string());
    }
    csv << trajectory_csv(r);
    meta << run_metadata(r).dump(2) << "\n";
    return out;
}

std::vector<RunResult> sweep(const std::vector<Scenario>& scenarios, Execution exec) {
    std::vector<std::optional<RunResult>> slots(scenarios.size());
    parallel_for(scenarios.size(), exec, [&](std::size_t k) {
        slots[k] = run_scenario(scenarios[k], Execution::serial);
    });
    std::vector<RunResult> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

std::string sweep_summary_csv(const std::vector<RunResult>& runs, const std::string& parameter,
                              const std::vector<double>& values) {
    std::ostringstream os;
    os << "# fermidyn-sweep/1\n";
    os << parameter << ",t_end,max_eigenvalue,min_eigenvalue,violation,unitality_residual,"
                       "hole_max_defect";
    const Eigen::Index d = runs.empty() ? 0 : runs.front().spec.dim();
    for (Eigen::Index j = 0; j < d; ++j) {
        os << ",final_n" << j;
    }
    os << "\n" << std::setprecision(12);
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& r = runs[k];
        os << values[k] << ',' << r.t_end << ',' << r.audit.max_eigenvalue << ','
           << r.audit.min_eigenvalue << ',' << (r.audit.violation() ? 1 : 0) << ',' << r.unitality
           << ',' << (r.hole ? r.hole->max_defect : 0.0);
        const RealVector fin = eigenbasis_populations(r).back();
        for (Eigen::Index j = 0; j < fin.size(); ++j) {
            os << ',' << fin(j);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace fermidyn
