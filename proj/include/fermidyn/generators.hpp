// generators.hpp — Liouvillians of the Redfield, unified and universal Lindblad equations
//
// Every dissipator is a sum over channel pairs
//     Σ_{ab} c_ab ( A_a ρ A_b† − ½{A_b† A_a, ρ} )
// and the three equations differ only in which pairs appear and in c_ab:
//     RME  all pairs,                   c_ab = Γ(ω_a) + Γ*(ω_b)
//     UME  pairs inside one cluster,    c_ab = 2 Re Γ(ω̄)
//     ULE  all pairs,                   c_ab = γ̂(ω_a) γ̂(ω_b)
// Pauli blocking multiplies population-transfer terms by f = χ − ρ^{ii}.

#pragma once

#include "fermidyn/bath.hpp"
#include "fermidyn/channels.hpp"
#include "fermidyn/kernels.hpp"
#include "fermidyn/rdm.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fermidyn {

enum class MasterEquation { redfield, unified, universal };

std::string_view to_string(MasterEquation kind);
// Accepts rme|ume|ule (case-insensitive).
MasterEquation parse_master_equation(std::string_view text);

struct UnsupportedOperation : std::logic_error {
    using std::logic_error::logic_error;
};

struct GeneratorOptions {
    MasterEquation kind{MasterEquation::redfield};
    bool pauli_blocked{false};
    bool lamb_shift{false};
    double clustering_threshold{0.0};   // Eh, UME only
    double chi{1.0};
    double physicality_tol{1e-6};       // blocked generators reject occupations outside [−tol, χ+tol]
};

// Rates are tabulated once per distinct frequency or cluster center.
struct RateTable {
    std::vector<double> frequencies;          // merged channel frequencies, ascending
    std::vector<cplx> redfield;               // Γ(ω) per frequency (RME)
    std::vector<double> cluster_centers;      // ω̄ per cluster (UME)
    std::vector<cplx> cluster_redfield;       // Γ(ω̄) per cluster (UME)
    std::vector<double> ule_gamma_hat;        // γ̂(ω) per frequency (ULE)
    // Ŝ(ω_ml, ω_ln), keyed by indices into SpectrumDecomposition::bohr_frequencies().
    std::map<std::pair<int, int>, double> ule_lamb;
    bool has_redfield_imag{false};
    bool has_cluster_imag{false};

    int index_of(double omega, double tol) const;
};

// Replaces every rate pair at ±ω by a common value (the T → ∞ proxy).
RateTable symmetrized(const RateTable& rates, double tol = 1e-9);

struct FlatChannel {
    int op{0};              // coupling-operator index α
    int channel{0};         // index inside that operator's ChannelSet
    double omega{0.0};
    int rate_index{-1};     // into RateTable::frequencies
    int cluster{-1};        // UME cluster index
};

struct DissipatorTerm {
    int left{0};            // flat channel a
    int right{0};           // flat channel b
    cplx rate;              // c_ab
};

// One block pair of the T-tensor: c · (A_ij ρ A_lk† − ½{A_lk† A_ij, ρ}).
struct TTensorTerm {
    int i{0}, j{0}, l{0}, k{0};     // subspace indices of Π_i A Π_j and Π_l A Π_k
    int left_channel{0}, left_block{0};      // flat channel and block index of Π_i A Π_j
    int right_channel{0}, right_block{0};    // ... and of Π_l A Π_k
    cplx coefficient;
    // Transfer targets whose Pauli factors weight this term. Weight = mean of the
    // factors listed; 1 when none (dephasing × dephasing).
    std::vector<int> blocked_by;
};

class GeneratorSpec {
public:
    static GeneratorSpec build(const SystemHamiltonian& h, std::vector<CouplingOperator> ops,
                               const BathModel& bath, const GeneratorOptions& options,
                               Execution exec = Execution::parallel);

    // Uses a caller-supplied rate table (e.g. symmetrized rates).
    static GeneratorSpec with_rates(const SystemHamiltonian& h, std::vector<CouplingOperator> ops,
                                    const GeneratorOptions& options, RateTable rates);

    // Same channels and rates, different options (blocking, Lamb shift, χ).
    GeneratorSpec with_blocking(bool pauli_blocked) const;

    const GeneratorOptions& options() const noexcept { return options_; }
    MasterEquation kind() const noexcept { return options_.kind; }
    bool pauli_blocked() const noexcept { return options_.pauli_blocked; }
    double chi() const noexcept { return options_.chi; }
    Eigen::Index dim() const noexcept { return spectrum_.dim(); }

    const SystemHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
    const SpectrumDecomposition& spectrum() const noexcept { return spectrum_; }
    const std::vector<CouplingOperator>& coupling_operators() const noexcept { return ops_; }
    const std::vector<ChannelSet>& channel_sets() const noexcept { return channel_sets_; }
    const std::optional<FrequencyClusters>& clusters() const noexcept { return clusters_; }
    const RateTable& rates() const noexcept { return rates_; }
    const std::optional<BathModel>& bath() const noexcept { return bath_; }

    const std::vector<FlatChannel>& flat_channels() const noexcept { return flat_; }
    const Matrix& channel_op(const FlatChannel& c) const;
    const ChannelBlock& block(int flat_channel, int block) const;
    const std::vector<DissipatorTerm>& terms() const noexcept { return terms_; }
    const std::vector<TTensorTerm>& t_tensor() const noexcept { return t_tensor_; }

    // H_LS when the Lamb shift is enabled, otherwise zero.
    const Matrix& lamb_hamiltonian() const noexcept { return lamb_; }

    // Rate of the diagonal term (ω, ω) entering the unitality constraint.
    double diagonal_rate(const FlatChannel& c) const;

private:
    friend GeneratorSpec secular_truncation(const GeneratorSpec& redfield);
    GeneratorSpec(const SystemHamiltonian& h, std::vector<CouplingOperator> ops,
                  const GeneratorOptions& options);
    void assign_rate_indices();
    void build_terms();
    void build_t_tensor();

    GeneratorOptions options_;
    SystemHamiltonian hamiltonian_;
    SpectrumDecomposition spectrum_;
    std::vector<CouplingOperator> ops_;
    std::vector<ChannelSet> channel_sets_;
    std::optional<FrequencyClusters> clusters_;
    std::optional<BathModel> bath_;
    RateTable rates_;
    std::vector<FlatChannel> flat_;
    std::vector<DissipatorTerm> terms_;
    std::vector<TTensorTerm> t_tensor_;
    Matrix lamb_;
};

// Lamb-shift Hamiltonian from the tabulated coefficients. Throws UnsupportedOperation
// when the table lacks them (UME/ULE built without the Lamb shift).
Matrix lamb_shift_hamiltonian(const GeneratorSpec& spec);

// -------------------------------------------------- reference (direct) forms

Matrix dissipator_rme(const Matrix& rho, const GeneratorSpec& spec);
Matrix dissipator_ume(const Matrix& rho, const GeneratorSpec& spec);
Matrix dissipator_ule(const Matrix& rho, const GeneratorSpec& spec);
// ULE via the single jump operator L_α = Σ_ω γ̂(ω) A_αω.
Matrix dissipator_ule_jump(const Matrix& rho, const GeneratorSpec& spec);
Matrix dissipator_blocked(const Matrix& rho, const GeneratorSpec& spec);

// Dispatches on kind and blocking.
Matrix dissipator(const Matrix& rho, const GeneratorSpec& spec);

// −i[H_S + H_LS, ρ] + 𝒟(ρ)
Matrix liouvillian_action(const Matrix& rho, const Matrix& h_s, const GeneratorSpec& spec);

// Pauli factors χ − ρ^{ii} per eigen-subspace (per-orbital occupation).
RealVector pauli_factors(const Matrix& rho, const GeneratorSpec& spec);

// Column-major vec convention: 𝓛·vec(ρ) = vec(liouvillian_action(ρ)).
// Built from Kronecker products, independently of liouvillian_action.
Matrix superoperator_matrix(const Matrix& h_s, const GeneratorSpec& spec,
                            Execution exec = Execution::parallel);

// The RME restricted to ω = ω′ terms.
GeneratorSpec secular_truncation(const GeneratorSpec& redfield);

// ------------------------------------------------------------ fast path

// Precompiled generator for time stepping. Linear parts are factored as
// Σ_X X ρ Y_X† − ½{K, ρ}; blocked parts are split by Pauli-factor class.
class CompiledGenerator {
public:
    CompiledGenerator(const Matrix& h_s, const GeneratorSpec& spec);

    Matrix operator()(const Matrix& rho) const;
    bool is_linear() const noexcept { return classes_.empty(); }

private:
    struct LinearPart {
        std::vector<Matrix> left;     // X
        std::vector<Matrix> right;    // Y_X = Σ conj(c) Y
        Matrix anticommutator;        // K = Σ c Y† X
        void apply(const Matrix& rho, Matrix& out, double scale) const;
        bool empty() const noexcept { return left.empty(); }
    };

    Matrix h_eff_;
    double chi_{1.0};
    double physicality_tol_{1e-6};
    SpectrumDecomposition spectrum_;
    LinearPart base_;
    std::vector<std::pair<int, LinearPart>> classes_;   // (subspace, part) pairs
};

}  // namespace fermidyn
