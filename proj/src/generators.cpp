// generators.cpp — RME/UME/ULE dissipators, Pauli blocking, Lamb shifts, superoperators

#include "fermidyn/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

namespace fermidyn {

namespace {

// c · (X ρ Y† − ½{Y†X, ρ}) added to out.
void add_term(const Matrix& x, const Matrix& y, cplx c, const Matrix& rho, Matrix& out) {
    const Matrix yx = y.adjoint() * x;
    out.noalias() += c * (x * rho * y.adjoint());
    out.noalias() -= (0.5 * c) * (yx * rho + rho * yx);
}

void check_rho(const Matrix& rho, const GeneratorSpec& spec) {
    if (rho.rows() != spec.dim() || rho.cols() != spec.dim()) {
        std::ostringstream os;
        os << "dissipator: state is " << rho.rows() << "x" << rho.cols() << ", generator is "
           << spec.dim() << "x" << spec.dim();
        throw DimensionError(os.str());
    }
}

void require(const GeneratorSpec& spec, MasterEquation kind, bool blocked, const char* what) {
    if (spec.kind() != kind || spec.pauli_blocked() != blocked) {
        throw UnsupportedOperation(std::string(what) + ": generator is " +
                                   std::string(to_string(spec.kind())) +
                                   (spec.pauli_blocked() ? " (blocked)" : ""));
    }
}

Matrix apply_channel_terms(const Matrix& rho, const GeneratorSpec& spec) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    const auto& flat = spec.flat_channels();
    for (const auto& t : spec.terms()) {
        add_term(spec.channel_op(flat[static_cast<std::size_t>(t.left)]),
                 spec.channel_op(flat[static_cast<std::size_t>(t.right)]), t.rate, rho, out);
    }
    return out;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

int bohr_index(const SpectrumDecomposition& s, double omega) {
    const auto& b = s.bohr_frequencies();
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (std::abs(b[k] - omega) <= s.degeneracy_tol()) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

double block_frequency(const SpectrumDecomposition& s, const ChannelBlock& b) {
    const auto& subs = s.subspaces();
    return subs[static_cast<std::size_t>(b.source)].energy -
           subs[static_cast<std::size_t>(b.target)].energy;
}

// Ordered (m←l, l←n) block pairs of one coupling operator.
template <class F>
void for_each_block_chain(const ChannelSet& set, F&& f) {
    for (const auto& c1 : set.channels) {
        for (const auto& b1 : c1.blocks) {
            for (const auto& c2 : set.channels) {
                for (const auto& b2 : c2.blocks) {
                    if (b1.source == b2.target) {
                        f(b1, b2);
                    }
                }
            }
        }
    }
}

}  // namespace

std::string_view to_string(MasterEquation kind) {
    switch (kind) {
        case MasterEquation::redfield: return "rme";
        case MasterEquation::unified: return "ume";
        case MasterEquation::universal: return "ule";
    }
    return "?";
}

MasterEquation parse_master_equation(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (s == "rme" || s == "redfield") return MasterEquation::redfield;
    if (s == "ume" || s == "unified") return MasterEquation::unified;
    if (s == "ule" || s == "universal") return MasterEquation::universal;
    throw std::invalid_argument("unknown master equation '" + std::string(text) +
                                "' (expected rme, ume or ule)");
}

// ------------------------------------------------------------------ RateTable

int RateTable::index_of(double omega, double tol) const {
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        if (std::abs(frequencies[k] - omega) <= tol) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

RateTable symmetrized(const RateTable& rates, double tol) {
    RateTable out = rates;
    auto mirror = [tol](const std::vector<double>& axis, std::size_t k) -> int {
        for (std::size_t m = 0; m < axis.size(); ++m) {
            if (std::abs(axis[m] + axis[k]) <= tol) {
                return static_cast<int>(m);
            }
        }
        return -1;
    };
    for (std::size_t k = 0; k < rates.frequencies.size(); ++k) {
        const int m = mirror(rates.frequencies, k);
        if (m < 0) {
            continue;
        }
        const auto mm = static_cast<std::size_t>(m);
        if (k < rates.redfield.size() && mm < rates.redfield.size()) {
            const double re = 0.5 * (rates.redfield[k].real() + rates.redfield[mm].real());
            out.redfield[k] = {re, rates.redfield[k].imag()};
        }
        if (k < rates.ule_gamma_hat.size() && mm < rates.ule_gamma_hat.size()) {
            const double a = rates.ule_gamma_hat[k];
            const double b = rates.ule_gamma_hat[mm];
            out.ule_gamma_hat[k] = std::sqrt(0.5 * (a * a + b * b));
        }
    }
    for (std::size_t k = 0; k < rates.cluster_centers.size(); ++k) {
        const int m = mirror(rates.cluster_centers, k);
        if (m < 0 || k >= rates.cluster_redfield.size()) {
            continue;
        }
        const auto mm = static_cast<std::size_t>(m);
        const double re =
            0.5 * (rates.cluster_redfield[k].real() + rates.cluster_redfield[mm].real());
        out.cluster_redfield[k] = {re, rates.cluster_redfield[k].imag()};
    }
    return out;
}

// -------------------------------------------------------------- GeneratorSpec

GeneratorSpec::GeneratorSpec(const SystemHamiltonian& h, std::vector<CouplingOperator> ops,
                             const GeneratorOptions& options)
    : options_(options), hamiltonian_(h), spectrum_(h), ops_(std::move(ops)) {
    if (!(options_.chi > 0.0)) {
        throw DomainError("GeneratorSpec: chi must be positive");
    }
    if (!(options_.clustering_threshold >= 0.0)) {
        throw DomainError("GeneratorSpec: clustering threshold must be nonnegative");
    }
    for (const auto& a : ops_) {
        channel_sets_.push_back(decompose(spectrum_, a));
    }
    for (std::size_t op = 0; op < channel_sets_.size(); ++op) {
        const auto& set = channel_sets_[op];
        for (std::size_t c = 0; c < set.channels.size(); ++c) {
            FlatChannel fc;
            fc.op = static_cast<int>(op);
            fc.channel = static_cast<int>(c);
            fc.omega = set.channels[c].omega;
            flat_.push_back(fc);
        }
    }
    if (options_.kind == MasterEquation::unified) {
        const auto freqs = merged_frequencies(channel_sets_, spectrum_.degeneracy_tol());
        clusters_ = cluster(freqs, options_.clustering_threshold);
    }
    lamb_ = Matrix::Zero(spectrum_.dim(), spectrum_.dim());
}

GeneratorSpec GeneratorSpec::build(const SystemHamiltonian& h, std::vector<CouplingOperator> ops,
                                   const BathModel& bath, const GeneratorOptions& options,
                                   Execution exec) {
    GeneratorSpec spec(h, std::move(ops), options);
    bath.validate();
    spec.bath_ = bath;
    const double tol = spec.spectrum_.degeneracy_tol();
    RateTable& rates = spec.rates_;
    rates.frequencies = merged_frequencies(spec.channel_sets_, tol);
    double wmax = 0.0;
    for (double w : spec.spectrum_.bohr_frequencies()) {
        wmax = std::max(wmax, std::abs(w));
    }
    bath.require_cutoff_covers(wmax);

    switch (options.kind) {
        case MasterEquation::redfield:
            // Cross rates Γ(ω) + Γ*(ω′) carry ξ(ω) − ξ(ω′) even without H_LS.
            rates.redfield = redfield_table(rates.frequencies, bath, true, exec);
            rates.has_redfield_imag = true;
            break;
        case MasterEquation::unified: {
            for (const auto& c : spec.clusters_->clusters) {
                rates.cluster_centers.push_back(c.center);
            }
            rates.cluster_redfield =
                redfield_table(rates.cluster_centers, bath, options.lamb_shift, exec);
            rates.has_cluster_imag = options.lamb_shift;
            break;
        }
        case MasterEquation::universal: {
            for (double w : rates.frequencies) {
                rates.ule_gamma_hat.push_back(ule_rate(w, bath));
            }
            if (options.lamb_shift) {
                std::vector<std::pair<int, int>> keys;
                for (const auto& set : spec.channel_sets_) {
                    for_each_block_chain(set, [&](const ChannelBlock& b1, const ChannelBlock& b2) {
                        keys.emplace_back(bohr_index(spec.spectrum_, block_frequency(spec.spectrum_, b1)),
                                          bohr_index(spec.spectrum_, block_frequency(spec.spectrum_, b2)));
                    });
                }
                std::sort(keys.begin(), keys.end());
                keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
                std::vector<std::pair<double, double>> pairs;
                const auto& bohr = spec.spectrum_.bohr_frequencies();
                for (const auto& [m, n] : keys) {
                    pairs.emplace_back(bohr[static_cast<std::size_t>(m)],
                                       bohr[static_cast<std::size_t>(n)]);
                }
                const auto values = ule_lamb_table(pairs, bath, exec);
                for (std::size_t k = 0; k < keys.size(); ++k) {
                    rates.ule_lamb[keys[k]] = values[k];
                }
            }
            break;
        }
    }
    spec.assign_rate_indices();
    spec.build_terms();
    spec.build_t_tensor();
    if (options.lamb_shift) {
        spec.lamb_ = hermitize(lamb_shift_hamiltonian(spec));
    }
    return spec;
}

GeneratorSpec GeneratorSpec::with_rates(const SystemHamiltonian& h,
                                        std::vector<CouplingOperator> ops,
                                        const GeneratorOptions& options, RateTable rates) {
    GeneratorSpec spec(h, std::move(ops), options);
    spec.rates_ = std::move(rates);
    if (spec.clusters_ && spec.rates_.cluster_redfield.size() != spec.clusters_->clusters.size()) {
        throw std::invalid_argument("GeneratorSpec::with_rates: cluster rate count mismatch");
    }
    spec.assign_rate_indices();
    spec.build_terms();
    spec.build_t_tensor();
    if (options.lamb_shift) {
        spec.lamb_ = hermitize(lamb_shift_hamiltonian(spec));
    }
    return spec;
}

GeneratorSpec GeneratorSpec::with_blocking(bool pauli_blocked) const {
    GeneratorSpec copy = *this;
    copy.options_.pauli_blocked = pauli_blocked;
    return copy;
}

const Matrix& GeneratorSpec::channel_op(const FlatChannel& c) const {
    return channel_sets_[static_cast<std::size_t>(c.op)]
        .channels[static_cast<std::size_t>(c.channel)]
        .op;
}

const ChannelBlock& GeneratorSpec::block(int flat_channel, int block) const {
    const auto& fc = flat_[static_cast<std::size_t>(flat_channel)];
    return channel_sets_[static_cast<std::size_t>(fc.op)]
        .channels[static_cast<std::size_t>(fc.channel)]
        .blocks[static_cast<std::size_t>(block)];
}

void GeneratorSpec::assign_rate_indices() {
    const double tol = spectrum_.degeneracy_tol();
    for (auto& fc : flat_) {
        if (options_.kind == MasterEquation::unified) {
            fc.cluster = clusters_->cluster_of(fc.omega, tol);
            if (fc.cluster < 0) {
                throw std::logic_error("GeneratorSpec: channel frequency outside every cluster");
            }
            continue;
        }
        fc.rate_index = rates_.index_of(fc.omega, tol);
        const std::size_t have = options_.kind == MasterEquation::redfield
                                     ? rates_.redfield.size()
                                     : rates_.ule_gamma_hat.size();
        if (fc.rate_index < 0 || static_cast<std::size_t>(fc.rate_index) >= have) {
            std::ostringstream os;
            os << "GeneratorSpec: rate table has no entry for omega = " << fc.omega;
            throw std::invalid_argument(os.str());
        }
    }
}

double GeneratorSpec::diagonal_rate(const FlatChannel& c) const {
    switch (options_.kind) {
        case MasterEquation::redfield:
            return 2.0 * rates_.redfield[static_cast<std::size_t>(c.rate_index)].real();
        case MasterEquation::unified:
            return 2.0 * rates_.cluster_redfield[static_cast<std::size_t>(c.cluster)].real();
        case MasterEquation::universal: {
            const double g = rates_.ule_gamma_hat[static_cast<std::size_t>(c.rate_index)];
            return g * g;
        }
    }
    return 0.0;
}

void GeneratorSpec::build_terms() {
    terms_.clear();
    for (std::size_t a = 0; a < flat_.size(); ++a) {
        for (std::size_t b = 0; b < flat_.size(); ++b) {
            const auto& fa = flat_[a];
            const auto& fb = flat_[b];
            if (fa.op != fb.op) {
                continue;   // independent bath per coupling operator
            }
            cplx c;
            switch (options_.kind) {
                case MasterEquation::redfield:
                    c = rme_rate(rates_.redfield[static_cast<std::size_t>(fa.rate_index)],
                                 rates_.redfield[static_cast<std::size_t>(fb.rate_index)]);
                    break;
                case MasterEquation::unified:
                    if (fa.cluster != fb.cluster) {
                        continue;
                    }
                    c = 2.0 * rates_.cluster_redfield[static_cast<std::size_t>(fa.cluster)].real();
                    break;
                case MasterEquation::universal:
                    c = rates_.ule_gamma_hat[static_cast<std::size_t>(fa.rate_index)] *
                        rates_.ule_gamma_hat[static_cast<std::size_t>(fb.rate_index)];
                    break;
            }
            if (!finite(c)) {
                throw std::invalid_argument("GeneratorSpec: non-finite rate");
            }
            terms_.push_back({static_cast<int>(a), static_cast<int>(b), c});
        }
    }
}

void GeneratorSpec::build_t_tensor() {
    t_tensor_.clear();
    for (const auto& t : terms_) {
        const auto& ca = channel_sets_[static_cast<std::size_t>(flat_[static_cast<std::size_t>(t.left)].op)]
                             .channels[static_cast<std::size_t>(flat_[static_cast<std::size_t>(t.left)].channel)];
        const auto& cb = channel_sets_[static_cast<std::size_t>(flat_[static_cast<std::size_t>(t.right)].op)]
                             .channels[static_cast<std::size_t>(flat_[static_cast<std::size_t>(t.right)].channel)];
        for (std::size_t p = 0; p < ca.blocks.size(); ++p) {
            for (std::size_t q = 0; q < cb.blocks.size(); ++q) {
                const auto& b1 = ca.blocks[p];
                const auto& b2 = cb.blocks[q];
                TTensorTerm tt;
                tt.i = b1.target;
                tt.j = b1.source;
                tt.l = b2.target;
                tt.k = b2.source;
                tt.left_channel = t.left;
                tt.left_block = static_cast<int>(p);
                tt.right_channel = t.right;
                tt.right_block = static_cast<int>(q);
                tt.coefficient = t.rate;
                if (b1.is_transfer()) tt.blocked_by.push_back(b1.target);
                if (b2.is_transfer()) tt.blocked_by.push_back(b2.target);
                t_tensor_.push_back(std::move(tt));
            }
        }
    }
}

// ----------------------------------------------------------------- Lamb shift

Matrix lamb_shift_hamiltonian(const GeneratorSpec& spec) {
    const Eigen::Index d = spec.dim();
    Matrix h = Matrix::Zero(d, d);
    const auto& rates = spec.rates();
    const auto& flat = spec.flat_channels();
    switch (spec.kind()) {
        case MasterEquation::redfield:
            if (!rates.has_redfield_imag) {
                throw UnsupportedOperation("lamb_shift_hamiltonian: rate table has no Im Γ");
            }
            for (const auto& t : spec.terms()) {
                const auto& fa = flat[static_cast<std::size_t>(t.left)];
                const auto& fb = flat[static_cast<std::size_t>(t.right)];
                const cplx s = rme_lamb(rates.redfield[static_cast<std::size_t>(fa.rate_index)],
                                        rates.redfield[static_cast<std::size_t>(fb.rate_index)]);
                h.noalias() += s * (spec.channel_op(fb).adjoint() * spec.channel_op(fa));
            }
            break;
        case MasterEquation::unified:
            if (!rates.has_cluster_imag) {
                throw UnsupportedOperation("lamb_shift_hamiltonian: rate table has no Im Γ(ω̄)");
            }
            for (const auto& t : spec.terms()) {
                const auto& fa = flat[static_cast<std::size_t>(t.left)];
                const auto& fb = flat[static_cast<std::size_t>(t.right)];
                const double s = rates.cluster_redfield[static_cast<std::size_t>(fa.cluster)].imag();
                h.noalias() += s * (spec.channel_op(fb).adjoint() * spec.channel_op(fa));
            }
            break;
        case MasterEquation::universal:
            for (const auto& set : spec.channel_sets()) {
                for_each_block_chain(set, [&](const ChannelBlock& b1, const ChannelBlock& b2) {
                    const int m = bohr_index(spec.spectrum(), block_frequency(spec.spectrum(), b1));
                    const int n = bohr_index(spec.spectrum(), block_frequency(spec.spectrum(), b2));
                    const auto it = rates.ule_lamb.find({m, n});
                    if (it == rates.ule_lamb.end()) {
                        throw UnsupportedOperation("lamb_shift_hamiltonian: rate table has no Ŝ");
                    }
                    h.noalias() += it->second * (b1.op * b2.op);
                });
            }
            break;
    }
    return h;
}

// ----------------------------------------------------------------- dissipators

Matrix dissipator_rme(const Matrix& rho, const GeneratorSpec& spec) {
    require(spec, MasterEquation::redfield, false, "dissipator_rme");
    check_rho(rho, spec);
    return apply_channel_terms(rho, spec);
}

Matrix dissipator_ume(const Matrix& rho, const GeneratorSpec& spec) {
    require(spec, MasterEquation::unified, false, "dissipator_ume");
    check_rho(rho, spec);
    return apply_channel_terms(rho, spec);
}

Matrix dissipator_ule(const Matrix& rho, const GeneratorSpec& spec) {
    require(spec, MasterEquation::universal, false, "dissipator_ule");
    check_rho(rho, spec);
    return apply_channel_terms(rho, spec);
}

Matrix dissipator_ule_jump(const Matrix& rho, const GeneratorSpec& spec) {
    require(spec, MasterEquation::universal, false, "dissipator_ule_jump");
    check_rho(rho, spec);
    const Eigen::Index d = spec.dim();
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t op = 0; op < spec.channel_sets().size(); ++op) {
        Matrix jump = Matrix::Zero(d, d);
        for (const auto& fc : spec.flat_channels()) {
            if (fc.op == static_cast<int>(op)) {
                jump += spec.rates().ule_gamma_hat[static_cast<std::size_t>(fc.rate_index)] *
                        spec.channel_op(fc);
            }
        }
        add_term(jump, jump, 1.0, rho, out);
    }
    return out;
}

RealVector pauli_factors(const Matrix& rho, const GeneratorSpec& spec) {
    check_rho(rho, spec);
    const RealVector occ = spec.spectrum().orbital_occupations(rho);
    const double chi = spec.chi();
    const double tol = spec.options().physicality_tol;
    for (Eigen::Index k = 0; k < occ.size(); ++k) {
        if (!(occ(k) >= -tol && occ(k) <= chi + tol)) {
            std::ostringstream os;
            os << std::setprecision(10) << "Pauli factor: occupation " << occ(k)
               << " of eigen-subspace " << k << " lies outside [0, " << chi << "] by more than "
               << tol;
            throw PhysicalityError(os.str());
        }
    }
    return RealVector::Constant(occ.size(), chi) - occ;
}

Matrix dissipator_blocked(const Matrix& rho, const GeneratorSpec& spec) {
    if (!spec.pauli_blocked()) {
        throw UnsupportedOperation("dissipator_blocked: generator is not Pauli-blocked");
    }
    const RealVector f = pauli_factors(rho, spec);
    Matrix out = Matrix::Zero(spec.dim(), spec.dim());
    for (const auto& t : spec.t_tensor()) {
        double w = 1.0;
        if (!t.blocked_by.empty()) {
            w = 0.0;
            for (int i : t.blocked_by) {
                w += f(i);
            }
            w /= static_cast<double>(t.blocked_by.size());
        }
        add_term(spec.block(t.left_channel, t.left_block).op,
                 spec.block(t.right_channel, t.right_block).op, w * t.coefficient, rho, out);
    }
    return out;
}

Matrix dissipator(const Matrix& rho, const GeneratorSpec& spec) {
    if (spec.pauli_blocked()) {
        return dissipator_blocked(rho, spec);
    }
    switch (spec.kind()) {
        case MasterEquation::redfield: return dissipator_rme(rho, spec);
        case MasterEquation::unified: return dissipator_ume(rho, spec);
        case MasterEquation::universal: return dissipator_ule(rho, spec);
    }
    return Matrix();
}

Matrix liouvillian_action(const Matrix& rho, const Matrix& h_s, const GeneratorSpec& spec) {
    check_rho(rho, spec);
    if (h_s.rows() != rho.rows() || h_s.cols() != rho.cols()) {
        throw DimensionError("liouvillian_action: Hamiltonian dimension mismatch");
    }
    const Matrix h = h_s + spec.lamb_hamiltonian();
    return cplx(0.0, -1.0) * commutator(h, rho) + dissipator(rho, spec);
}

Matrix superoperator_matrix(const Matrix& h_s, const GeneratorSpec& spec, Execution exec) {
    if (spec.pauli_blocked()) {
        throw UnsupportedOperation(
            "superoperator_matrix: Pauli-blocked generators are nonlinear and have no matrix");
    }
    if (h_s.rows() != spec.dim() || h_s.cols() != spec.dim()) {
        throw DimensionError("superoperator_matrix: Hamiltonian dimension mismatch");
    }
    std::vector<KroneckerTerm> terms;
    const auto& flat = spec.flat_channels();
    for (const auto& t : spec.terms()) {
        terms.push_back({&spec.channel_op(flat[static_cast<std::size_t>(t.left)]),
                         &spec.channel_op(flat[static_cast<std::size_t>(t.right)]), t.rate});
    }
    return kronecker_superoperator(h_s + spec.lamb_hamiltonian(), terms, exec);
}

GeneratorSpec secular_truncation(const GeneratorSpec& redfield) {
    if (redfield.kind() != MasterEquation::redfield) {
        throw UnsupportedOperation("secular_truncation: expects a Redfield generator");
    }
    GeneratorSpec out = redfield;
    std::erase_if(out.terms_, [](const DissipatorTerm& t) { return t.left != t.right; });
    out.build_t_tensor();
    if (out.options_.lamb_shift) {
        out.lamb_ = hermitize(lamb_shift_hamiltonian(out));
    }
    return out;
}

// ----------------------------------------------------------- CompiledGenerator

void CompiledGenerator::LinearPart::apply(const Matrix& rho, Matrix& out, double scale) const {
    for (std::size_t k = 0; k < left.size(); ++k) {
        out.noalias() += scale * (left[k] * rho * right[k].adjoint());
    }
    if (anticommutator.size() != 0) {
        out.noalias() -= (0.5 * scale) * (anticommutator * rho + rho * anticommutator);
    }
}

namespace {

struct PartBuilder {
    std::map<std::pair<int, int>, std::size_t> index;   // (flat channel, block) → slot
    std::vector<Matrix> left;
    std::vector<Matrix> right;
    Matrix k;

    void add(std::pair<int, int> key, const Matrix& x, const Matrix& y, cplx c) {
        auto [it, fresh] = index.try_emplace(key, left.size());
        if (fresh) {
            left.push_back(x);
            right.push_back(Matrix::Zero(y.rows(), y.cols()));
        }
        right[it->second] += std::conj(c) * y;
        if (k.size() == 0) {
            k = Matrix::Zero(x.rows(), x.cols());
        }
        k.noalias() += c * (y.adjoint() * x);
    }
};

}  // namespace

CompiledGenerator::CompiledGenerator(const Matrix& h_s, const GeneratorSpec& spec)
    : h_eff_(h_s + spec.lamb_hamiltonian()),
      chi_(spec.chi()),
      physicality_tol_(spec.options().physicality_tol),
      spectrum_(spec.spectrum()) {
    if (h_s.rows() != spec.dim() || h_s.cols() != spec.dim()) {
        throw DimensionError("CompiledGenerator: Hamiltonian dimension mismatch");
    }
    PartBuilder base;
    std::map<int, PartBuilder> classes;
    if (!spec.pauli_blocked()) {
        const auto& flat = spec.flat_channels();
        for (const auto& t : spec.terms()) {
            base.add({t.left, -1}, spec.channel_op(flat[static_cast<std::size_t>(t.left)]),
                     spec.channel_op(flat[static_cast<std::size_t>(t.right)]), t.rate);
        }
    } else {
        for (const auto& t : spec.t_tensor()) {
            const Matrix& x = spec.block(t.left_channel, t.left_block).op;
            const Matrix& y = spec.block(t.right_channel, t.right_block).op;
            const std::pair<int, int> key{t.left_channel, t.left_block};
            if (t.blocked_by.empty()) {
                base.add(key, x, y, t.coefficient);
                continue;
            }
            const double share = 1.0 / static_cast<double>(t.blocked_by.size());
            for (int i : t.blocked_by) {
                classes[i].add(key, x, y, share * t.coefficient);
            }
        }
    }
    auto finish = [](PartBuilder& b) {
        LinearPart p;
        p.left = std::move(b.left);
        p.right = std::move(b.right);
        p.anticommutator = std::move(b.k);
        return p;
    };
    base_ = finish(base);
    for (auto& [i, b] : classes) {
        classes_.emplace_back(i, finish(b));
    }
}

Matrix CompiledGenerator::operator()(const Matrix& rho) const {
    Matrix out = cplx(0.0, -1.0) * (h_eff_ * rho - rho * h_eff_);
    base_.apply(rho, out, 1.0);
    if (classes_.empty()) {
        return out;
    }
    const auto& subs = spectrum_.subspaces();
    for (const auto& [i, part] : classes_) {
        const auto& b = subs[static_cast<std::size_t>(i)].basis;
        const double occ =
            (b.adjoint() * rho * b).trace().real() / static_cast<double>(b.cols());
        if (!(occ >= -physicality_tol_ && occ <= chi_ + physicality_tol_)) {
            std::ostringstream os;
            os << std::setprecision(10) << "Pauli factor: occupation " << occ
               << " of eigen-subspace " << i << " lies outside [0, " << chi_ << "] by more than "
               << physicality_tol_;
            throw PhysicalityError(os.str());
        }
        part.apply(rho, out, chi_ - occ);
    }
    return out;
}

}  // namespace fermidyn
