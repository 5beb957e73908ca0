// scenario.hpp — Scenario files (JSON, tag "fermidyn-scenario/1") and built-in benchmarks
//
// Complex entries are written either as a number or as [re, im]. Coupling operators
// may be dense ("matrix") or sparse ("entries": [[i, j, value], ...]) with an
// optional "hermitian_conjugate": true that adds the adjoint of the listed entries.

#pragma once

#include "fermidyn/bath.hpp"
#include "fermidyn/generators.hpp"
#include "fermidyn/propagate.hpp"
#include "fermidyn/rdm.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fermidyn {

inline constexpr std::string_view kScenarioFormat = "fermidyn-scenario/1";

// Malformed scenario text or schema; the message carries source:line:column or the key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Schedule {
    std::optional<double> t_end;            // atomic time units; default 20/Γ_slowest
    std::optional<double> output_stride;    // default t_end/400
    IntegratorOptions integrator;
    bool copropagate_hole{true};
    bool verify_expm{false};
};

struct Scenario {
    std::string name;
    SystemHamiltonian hamiltonian{std::vector<double>{0.0}};
    std::vector<CouplingOperator> coupling_operators;
    Matrix initial_state;                   // site basis
    double chi{1.0};
    double lambda{0.01};
    double temperature{50.0};
    int pv_points{24};
    std::optional<double> pv_cutoff;
    GeneratorOptions generator;
    Schedule schedule;

    // make_bath over the Bohr frequencies, unless pv_cutoff is given explicitly.
    BathModel bath() const;
};

Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");
Scenario load_scenario(const std::string& path);

nlohmann::json to_json(const Scenario& s);
std::string dump_scenario(const Scenario& s);

// H = diag(−0.5, 0, 0.5), A = |0⟩⟨1| + |1⟩⟨2| + h.c., χ = 1, ρ₀ = |2⟩⟨2|.
Scenario builtin_three_level(MasterEquation kind = MasterEquation::universal);

// Six spatial orbitals, χ = 2, ρ₀ = diag(2,1,1,1,1,0).
Scenario builtin_benzene(MasterEquation kind = MasterEquation::redfield,
                         double clustering_threshold = 0.0);

// "three-level" or "benzene"; throws ConfigError otherwise.
Scenario builtin(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace fermidyn
