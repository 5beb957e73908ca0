// channels.cpp — Eigen-subspaces, channel decomposition and frequency clustering

#include "fermidyn/channels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace fermidyn {

// ------------------------------------------------------ SpectrumDecomposition

SpectrumDecomposition::SpectrumDecomposition(const SystemHamiltonian& h)
    : dim_(h.dim()), degeneracy_tol_(h.degeneracy_tol()) {
    const RealVector& eps = h.energies();
    const Matrix& u = h.eigenvectors();
    Eigen::Index start = 0;
    while (start < dim_) {
        Eigen::Index stop = start + 1;
        // Chain levels whose consecutive spacing is within the degeneracy tolerance.
        while (stop < dim_ && eps(stop) - eps(stop - 1) <= degeneracy_tol_) {
            ++stop;
        }
        EigenSubspace sub;
        sub.energy = eps.segment(start, stop - start).mean();
        sub.basis = u.middleCols(start, stop - start);
        sub.projector = sub.basis * sub.basis.adjoint();
        subspaces_.push_back(std::move(sub));
        start = stop;
    }

    std::vector<double> all;
    for (const auto& a : subspaces_) {
        for (const auto& b : subspaces_) {
            all.push_back(b.energy - a.energy);
        }
    }
    std::sort(all.begin(), all.end());
    for (double w : all) {
        if (bohr_.empty() || w - bohr_.back() > degeneracy_tol_) {
            bohr_.push_back(w);
        }
    }
}

RealVector SpectrumDecomposition::subspace_populations(const Matrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
        throw DimensionError("subspace_populations: dimension mismatch");
    }
    RealVector pop(static_cast<Eigen::Index>(subspaces_.size()));
    for (std::size_t k = 0; k < subspaces_.size(); ++k) {
        const Matrix& b = subspaces_[k].basis;
        pop(static_cast<Eigen::Index>(k)) = (b.adjoint() * rho * b).trace().real();
    }
    return pop;
}

RealVector SpectrumDecomposition::orbital_occupations(const Matrix& rho) const {
    RealVector occ = subspace_populations(rho);
    for (std::size_t k = 0; k < subspaces_.size(); ++k) {
        occ(static_cast<Eigen::Index>(k)) /= static_cast<double>(subspaces_[k].size());
    }
    return occ;
}

// ---------------------------------------------------------------- ChannelSet

std::vector<double> ChannelSet::frequencies() const {
    std::vector<double> out;
    out.reserve(channels.size());
    for (const auto& c : channels) {
        out.push_back(c.omega);
    }
    return out;
}

const Channel* ChannelSet::find(double omega) const {
    for (const auto& c : channels) {
        if (std::abs(c.omega - omega) <= degeneracy_tol) {
            return &c;
        }
    }
    return nullptr;
}

Matrix ChannelSet::reconstruct() const {
    if (channels.empty()) {
        return Matrix();
    }
    Matrix sum = Matrix::Zero(channels.front().op.rows(), channels.front().op.cols());
    for (const auto& c : channels) {
        sum += c.op;
    }
    return sum;
}

ChannelSet decompose(const SpectrumDecomposition& spectrum, const CouplingOperator& a,
                     double drop_tol) {
    if (a.matrix.rows() != spectrum.dim()) {
        throw DimensionError("decompose: coupling operator '" + a.label +
                             "' does not match the Hamiltonian dimension");
    }
    struct Raw {
        double omega;
        ChannelBlock block;
    };
    std::vector<Raw> raw;
    const auto& subs = spectrum.subspaces();
    for (std::size_t i = 0; i < subs.size(); ++i) {
        for (std::size_t j = 0; j < subs.size(); ++j) {
            Matrix op = subs[i].projector * a.matrix * subs[j].projector;
            if (max_abs(op) < drop_tol) {
                continue;
            }
            raw.push_back({subs[j].energy - subs[i].energy,
                           {static_cast<int>(i), static_cast<int>(j), std::move(op)}});
        }
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Raw& x, const Raw& y) { return x.omega < y.omega; });

    ChannelSet set;
    set.label = a.label;
    set.degeneracy_tol = spectrum.degeneracy_tol();
    std::size_t k = 0;
    while (k < raw.size()) {
        std::size_t stop = k + 1;
        while (stop < raw.size() && raw[stop].omega - raw[stop - 1].omega <= set.degeneracy_tol) {
            ++stop;
        }
        Channel ch;
        double sum = 0.0;
        ch.op = Matrix::Zero(spectrum.dim(), spectrum.dim());
        for (std::size_t m = k; m < stop; ++m) {
            sum += raw[m].omega;
            ch.op += raw[m].block.op;
            ch.blocks.push_back(std::move(raw[m].block));
        }
        ch.omega = sum / static_cast<double>(stop - k);
        if (max_abs(ch.op) >= drop_tol) {
            set.channels.push_back(std::move(ch));
        }
        k = stop;
    }
    return set;
}

ChannelSet decompose(const SystemHamiltonian& h, const CouplingOperator& a, double drop_tol) {
    return decompose(SpectrumDecomposition(h), a, drop_tol);
}

// ---------------------------------------------------------------- clustering

int FrequencyClusters::cluster_of(double omega, double tol) const {
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (double m : clusters[c].members) {
            if (std::abs(m - omega) <= tol) {
                return static_cast<int>(c);
            }
        }
    }
    return -1;
}

std::optional<int> FrequencyClusters::zero_cluster(double tol) const {
    const int c = cluster_of(0.0, tol);
    if (c < 0) {
        return std::nullopt;
    }
    return c;
}

namespace {
constexpr double kGapSlack = 1e-12;
}

FrequencyClusters cluster(std::span<const double> sorted_frequencies, double threshold) {
    if (!(threshold >= 0.0)) {
        throw DomainError("cluster: threshold must be nonnegative");
    }
    if (!std::is_sorted(sorted_frequencies.begin(), sorted_frequencies.end())) {
        throw DomainError("cluster: frequencies must be sorted ascending");
    }
    FrequencyClusters out;
    out.threshold = threshold;
    for (std::size_t k = 0; k < sorted_frequencies.size(); ++k) {
        const double w = sorted_frequencies[k];
        // Gaps equal to the threshold up to rounding stay in the same cluster.
        if (k == 0 || w - sorted_frequencies[k - 1] >
                          threshold + kGapSlack * std::max(1.0, std::abs(w))) {
            out.clusters.emplace_back();
        }
        out.clusters.back().members.push_back(w);
    }
    for (auto& c : out.clusters) {
        c.center = std::accumulate(c.members.begin(), c.members.end(), 0.0) /
                   static_cast<double>(c.members.size());
    }
    return out;
}

std::vector<double> merged_frequencies(std::span<const ChannelSet> sets, double tol) {
    std::vector<double> all;
    for (const auto& s : sets) {
        for (const auto& c : s.channels) {
            all.push_back(c.omega);
        }
    }
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double w : all) {
        if (out.empty() || w - out.back() > tol) {
            out.push_back(w);
        }
    }
    return out;
}

std::string channel_table_csv(std::span<const ChannelSet> sets, const FrequencyClusters* clusters) {
    std::ostringstream os;
    os << "# fermidyn-channels/1\n";
    os << "operator,omega,norm_max,blocks,cluster\n";
    os << std::setprecision(12);
    for (const auto& s : sets) {
        for (const auto& c : s.channels) {
            const int cid = clusters ? clusters->cluster_of(c.omega, s.degeneracy_tol) : -1;
            os << s.label << ',' << c.omega << ',' << max_abs(c.op) << ',' << c.blocks.size()
               << ',' << cid << '\n';
        }
    }
    return os.str();
}

}  // namespace fermidyn
