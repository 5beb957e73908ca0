// channels.hpp — Bohr-frequency channels of coupling operators and UME clustering
//
// A_ω = Σ_{ε_j′ − ε_j = ω} Π_j A Π_j′, with Π_j projectors onto (possibly degenerate)
// eigen-subspaces of H_S. A block Π_i A Π_j moves population from subspace j to i.

#pragma once

#include "fermidyn/rdm.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fermidyn {

struct EigenSubspace {
    double energy{0.0};
    Matrix basis;        // d × m, orthonormal columns
    Matrix projector;    // basis · basis†
    Eigen::Index size() const noexcept { return basis.cols(); }
};

class SpectrumDecomposition {
public:
    explicit SpectrumDecomposition(const SystemHamiltonian& h);

    Eigen::Index dim() const noexcept { return dim_; }
    double degeneracy_tol() const noexcept { return degeneracy_tol_; }
    const std::vector<EigenSubspace>& subspaces() const noexcept { return subspaces_; }
    std::size_t size() const noexcept { return subspaces_.size(); }

    // Distinct Bohr frequencies ε_j′ − ε_j over all subspace pairs, sorted.
    const std::vector<double>& bohr_frequencies() const noexcept { return bohr_; }

    // tr(Π_k ρ) per subspace.
    RealVector subspace_populations(const Matrix& rho) const;

    // tr(Π_k ρ) / dim Π_k, the per-orbital occupation used by Pauli factors.
    RealVector orbital_occupations(const Matrix& rho) const;

private:
    Eigen::Index dim_{0};
    double degeneracy_tol_{0.0};
    std::vector<EigenSubspace> subspaces_;
    std::vector<double> bohr_;
};

struct ChannelBlock {
    int target{0};       // subspace index i in Π_i A Π_j
    int source{0};       // subspace index j
    Matrix op;
    bool is_transfer() const noexcept { return target != source; }
};

struct Channel {
    double omega{0.0};
    Matrix op;                          // A_ω
    std::vector<ChannelBlock> blocks;   // nonzero Π_i A Π_j contributing to A_ω
};

struct ChannelSet {
    std::string label;
    double degeneracy_tol{1e-9};
    std::vector<Channel> channels;      // ascending ω

    std::vector<double> frequencies() const;
    const Channel* find(double omega) const;
    Matrix reconstruct() const;         // Σ_ω A_ω
};

// Channels with ‖A_ω‖_max < drop_tol are removed.
ChannelSet decompose(const SpectrumDecomposition& spectrum, const CouplingOperator& a,
                     double drop_tol = 1e-12);
ChannelSet decompose(const SystemHamiltonian& h, const CouplingOperator& a,
                     double drop_tol = 1e-12);

struct Cluster {
    std::vector<double> members;
    double center{0.0};
};

struct FrequencyClusters {
    std::vector<Cluster> clusters;
    double threshold{0.0};

    // Cluster index holding ω (within tol), or −1.
    int cluster_of(double omega, double tol = 1e-9) const;
    // Index of the cluster 𝓕_0̄ containing ω = 0, if any.
    std::optional<int> zero_cluster(double tol = 1e-9) const;
};

// Greedy single linkage over the sorted, signed axis: a new cluster starts
// whenever the gap to the previous frequency exceeds the threshold (by more than
// 1e-12·max(1, |ω|), so that a gap of exactly the threshold stays clustered).
FrequencyClusters cluster(std::span<const double> sorted_frequencies, double threshold);

// Union of the channel frequencies of several operators, merged within tol.
std::vector<double> merged_frequencies(std::span<const ChannelSet> sets, double tol);

// omega,norm_max,cluster; cluster is −1 without clustering.
std::string channel_table_csv(std::span<const ChannelSet> sets,
                              const FrequencyClusters* clusters = nullptr);

}  // namespace fermidyn
