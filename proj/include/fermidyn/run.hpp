// run.hpp — Propagate a scenario, audit it and write CSV + metadata

#pragma once

#include "fermidyn/kernels.hpp"
#include "fermidyn/representability.hpp"
#include "fermidyn/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fermidyn {

inline constexpr std::string_view kTrajectoryFormat = "fermidyn-trajectory/1";
inline constexpr std::string_view kMetadataFormat = "fermidyn-run-meta/1";
inline constexpr int kDefaultOutputPoints = 400;

GeneratorSpec build_generator(const Scenario& s, Execution exec = Execution::parallel);

// Smallest diagonal channel rate that is at least 1e-8 of the largest.
double slowest_rate(const GeneratorSpec& spec);

// 20 / Γ_slowest
double default_t_end(const GeneratorSpec& spec);

struct RunResult {
    RunResult(Scenario s, GeneratorSpec g) : scenario(std::move(s)), spec(std::move(g)) {}

    Scenario scenario;
    GeneratorSpec spec;
    double t_end{0.0};
    double output_stride{0.0};
    std::string t_end_source;              // "scenario" or "20/Gamma_slowest"
    Trajectory trajectory;
    std::optional<HoleTrajectory> hole;
    AuditSummary audit;
    std::optional<ConstraintReport> constraint;   // unblocked generators only
    double unitality{0.0};
    std::optional<double> expm_deviation;         // linear generators with verify_expm
};

RunResult run_scenario(const Scenario& s, Execution exec = Execution::parallel);

// Orbital occupations ⟨e_j|ρ|e_j⟩ in the eigenbasis of H_S, one row per recorded time.
std::vector<RealVector> eigenbasis_populations(const RunResult& r);

std::string trajectory_csv(const RunResult& r);
nlohmann::json run_metadata(const RunResult& r);

// FERMIDYN_OUTPUT_DIR, or the current directory.
std::filesystem::path default_output_dir();

struct WrittenFiles {
    std::filesystem::path csv;
    std::filesystem::path meta;
};
WrittenFiles write_outputs(const RunResult& r, const std::filesystem::path& dir,
                           const std::string& stem);

// One scenario per entry, run concurrently; results keep the input order.
std::vector<RunResult> sweep(const std::vector<Scenario>& scenarios, Execution exec);

std::string sweep_summary_csv(const std::vector<RunResult>& runs, const std::string& parameter,
                              const std::vector<double>& values);

}  // namespace fermidyn
