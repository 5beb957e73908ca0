// scenario.cpp — JSON scenario parsing, serialization and the built-in benchmarks

#include "fermidyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fermidyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

const json& at(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        fail(path, "missing key '" + key + "'");
    }
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        fail(path, "expected a number");
    }
    return j.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? fallback : number(*it, path + "/" + key);
}

bool bool_or(const json& obj, const std::string& key, bool fallback, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        return fallback;
    }
    if (!it->is_boolean()) {
        fail(path + "/" + key, "expected true or false");
    }
    return it->get<bool>();
}

cplx complex_value(const json& j, const std::string& path) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    fail(path, "expected a number or a [re, im] pair");
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        fail(path, "expected a non-empty array of numbers");
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(number(j[k], path + "/" + std::to_string(k)));
    }
    return out;
}

Matrix dense_matrix(const json& j, Eigen::Index d, const std::string& path) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d) {
        fail(path, "expected " + std::to_string(d) + " rows");
    }
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        const std::string rp = path + "/" + std::to_string(r);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
            fail(rp, "expected " + std::to_string(d) + " columns");
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = complex_value(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
        }
    }
    return m;
}

Matrix sparse_matrix(const json& j, Eigen::Index d, bool add_adjoint, const std::string& path) {
    if (!j.is_array()) {
        fail(path, "expected an array of [i, j, value] entries");
    }
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < j.size(); ++k) {
        const json& e = j[k];
        const std::string ep = path + "/" + std::to_string(k);
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
            !e[1].is_number_integer()) {
            fail(ep, "expected [i, j, value] with integer indices");
        }
        const auto r = e[0].get<Eigen::Index>();
        const auto c = e[1].get<Eigen::Index>();
        if (r < 0 || r >= d || c < 0 || c >= d) {
            fail(ep, "index out of range for dimension " + std::to_string(d));
        }
        const cplx v = complex_value(e[2], ep + "/2");
        m(r, c) += v;
        if (add_adjoint) {
            m(c, r) += std::conj(v);
        }
    }
    return m;
}

json complex_json(cplx z) {
    if (z.imag() == 0.0) {
        return z.real();
    }
    return json::array({z.real(), z.imag()});
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Upper-triangle entries plus the hermitian_conjugate flag; exact for Hermitian input.
json sparse_hermitian_json(const Matrix& m) {
    json entries = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = r; c < m.cols(); ++c) {
            if (m(r, c) == cplx(0.0, 0.0)) {
                continue;
            }
            const cplx v = r == c ? 0.5 * m(r, c) : m(r, c);
            entries.push_back(json::array({r, c, complex_json(v)}));
        }
    }
    return entries;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

BathModel Scenario::bath() const {
    double wmax = 0.0;
    const RealVector& e = hamiltonian.energies();
    if (e.size() > 0) {
        wmax = e.maxCoeff() - e.minCoeff();
    }
    BathModel b = make_bath(lambda, temperature, wmax, pv_points);
    if (pv_cutoff) {
        b.pv_cutoff = *pv_cutoff;
        b.validate();
        b.require_cutoff_covers(wmax);
    }
    return b;
}

Scenario parse_scenario(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::ostringstream os;
        os << source << ":" << line << ":" << col << ": malformed JSON";
        // Echo the offending line.
        std::size_t start = 0;
        for (std::size_t l = 1; l < line; ++l) {
            start = text.find('\n', start) + 1;
        }
        const std::size_t stop = text.find('\n', start);
        os << "\n  " << text.substr(start, stop == std::string_view::npos ? stop : stop - start);
        os << "\n  " << std::string(col > 1 ? col - 1 : 0, ' ') << "^";
        throw ConfigError(os.str());
    }

    const std::string src(source);
    try {
        if (!root.is_object()) {
            fail(src, "top level must be an object");
        }
        const json& fmt = at(root, "format", src);
        if (!fmt.is_string() || fmt.get<std::string>() != kScenarioFormat) {
            fail(src + "/format", "expected \"" + std::string(kScenarioFormat) + "\"");
        }
        Scenario s;
        s.name = root.value("name", std::string("scenario"));

        const std::string hp = src + "/hamiltonian";
        const json& hj = at(root, "hamiltonian", src);
        const auto energies = number_list(at(hj, "energies", hp), hp + "/energies");
        const auto d = static_cast<Eigen::Index>(energies.size());
        const double deg_tol = number_or(hj, "degeneracy_tol", 1e-9, hp);
        try {
            if (hj.contains("eigenvectors")) {
                s.hamiltonian = SystemHamiltonian(
                    energies, dense_matrix(hj["eigenvectors"], d, hp + "/eigenvectors"), deg_tol);
            } else {
                s.hamiltonian = SystemHamiltonian(energies, deg_tol);
            }
        } catch (const std::invalid_argument& e) {
            fail(hp, e.what());
        }

        const std::string cp = src + "/coupling_operators";
        const json& ops = at(root, "coupling_operators", src);
        if (!ops.is_array() || ops.empty()) {
            fail(cp, "expected a non-empty array");
        }
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const std::string op = cp + "/" + std::to_string(k);
            const json& oj = ops[k];
            const std::string label = oj.value("label", "A" + std::to_string(k));
            Matrix m;
            if (oj.contains("matrix")) {
                m = dense_matrix(oj["matrix"], d, op + "/matrix");
            } else if (oj.contains("entries")) {
                m = sparse_matrix(oj["entries"], d, bool_or(oj, "hermitian_conjugate", false, op),
                                  op + "/entries");
            } else {
                fail(op, "expected 'matrix' or 'entries'");
            }
            try {
                s.coupling_operators.emplace_back(label, m);
            } catch (const std::invalid_argument& e) {
                fail(op, e.what());
            }
        }

        s.chi = number_or(root, "chi", 1.0, src);
        const std::string ip = src + "/initial_state";
        const json& ij = at(root, "initial_state", src);
        if (ij.contains("occupations")) {
            const auto occ = number_list(ij["occupations"], ip + "/occupations");
            if (static_cast<Eigen::Index>(occ.size()) != d) {
                fail(ip + "/occupations", "expected " + std::to_string(d) + " values");
            }
            Matrix diag = Matrix::Zero(d, d);
            for (Eigen::Index k = 0; k < d; ++k) {
                diag(k, k) = occ[static_cast<std::size_t>(k)];
            }
            // Occupations refer to the eigenbasis of H_S.
            s.initial_state = s.hamiltonian.from_eigenbasis(diag);
        } else if (ij.contains("matrix")) {
            s.initial_state = dense_matrix(ij["matrix"], d, ip + "/matrix");
        } else {
            fail(ip, "expected 'occupations' or 'matrix'");
        }
        if (hermiticity_defect(s.initial_state) > 1e-10) {
            fail(ip, "initial state is not Hermitian");
        }

        const std::string bp = src + "/bath";
        const json& bj = at(root, "bath", src);
        s.lambda = number(at(bj, "lambda", bp), bp + "/lambda");
        s.temperature = number(at(bj, "temperature", bp), bp + "/temperature");
        s.pv_points = static_cast<int>(number_or(bj, "pv_points", 24, bp));
        if (bj.contains("pv_cutoff") && !bj["pv_cutoff"].is_null()) {
            s.pv_cutoff = number(bj["pv_cutoff"], bp + "/pv_cutoff");
        }

        const std::string gp = src + "/generator";
        const json& gj = at(root, "generator", src);
        const json& kind = at(gj, "kind", gp);
        if (!kind.is_string()) {
            fail(gp + "/kind", "expected \"rme\", \"ume\" or \"ule\"");
        }
        try {
            s.generator.kind = parse_master_equation(kind.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(gp + "/kind", e.what());
        }
        s.generator.clustering_threshold = number_or(gj, "clustering_threshold", 0.0, gp);
        s.generator.pauli_blocked = bool_or(gj, "pauli_blocked", false, gp);
        s.generator.lamb_shift = bool_or(gj, "lamb_shift", false, gp);
        s.generator.physicality_tol =
            number_or(gj, "physicality_tol", s.generator.physicality_tol, gp);
        if (!(s.generator.physicality_tol >= 0.0)) {
            fail(gp + "/physicality_tol", "must be non-negative");
        }
        s.generator.chi = s.chi;

        if (root.contains("schedule")) {
            const std::string sp = src + "/schedule";
            const json& sj = root["schedule"];
            if (sj.contains("t_end") && !sj["t_end"].is_null()) {
                s.schedule.t_end = number(sj["t_end"], sp + "/t_end");
            }
            if (sj.contains("output_stride") && !sj["output_stride"].is_null()) {
                s.schedule.output_stride = number(sj["output_stride"], sp + "/output_stride");
            }
            s.schedule.integrator.rtol = number_or(sj, "rtol", s.schedule.integrator.rtol, sp);
            s.schedule.integrator.atol = number_or(sj, "atol", s.schedule.integrator.atol, sp);
            s.schedule.copropagate_hole = bool_or(sj, "copropagate_hole", true, sp);
            s.schedule.verify_expm = bool_or(sj, "verify_expm", false, sp);
        }

        // Validates λ, T and the cutoff.
        try {
            (void)s.bath();
        } catch (const DomainError& e) {
            fail(bp, e.what());
        }
        const AuditReport audit = spectral_audit(s.initial_state, s.chi);
        if (audit.violation) {
            std::ostringstream os;
            os << "initial state fails the spectral audit (eigenvalues in [" << audit.min_eigenvalue
               << ", " << audit.max_eigenvalue << "], chi = " << s.chi << ")";
            fail(ip, os.str());
        }
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(src + ": " + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open scenario file");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

json to_json(const Scenario& s) {
    json j;
    j["format"] = kScenarioFormat;
    j["name"] = s.name;
    const RealVector& e = s.hamiltonian.energies();
    j["hamiltonian"]["energies"] = std::vector<double>(e.data(), e.data() + e.size());
    j["hamiltonian"]["degeneracy_tol"] = s.hamiltonian.degeneracy_tol();
    const Eigen::Index d = s.hamiltonian.dim();
    if (!s.hamiltonian.eigenvectors().isApprox(Matrix::Identity(d, d), 0.0)) {
        j["hamiltonian"]["eigenvectors"] = matrix_json(s.hamiltonian.eigenvectors());
    }
    j["coupling_operators"] = json::array();
    for (const auto& op : s.coupling_operators) {
        j["coupling_operators"].push_back({{"label", op.label},
                                           {"entries", sparse_hermitian_json(op.matrix)},
                                           {"hermitian_conjugate", true}});
    }
    j["chi"] = s.chi;
    const Matrix eig = s.hamiltonian.to_eigenbasis(s.initial_state);
    if (max_abs(eig - Matrix(eig.diagonal().asDiagonal())) == 0.0) {
        std::vector<double> occ;
        for (Eigen::Index k = 0; k < d; ++k) {
            occ.push_back(eig(k, k).real());
        }
        j["initial_state"]["occupations"] = occ;
    } else {
        j["initial_state"]["matrix"] = matrix_json(s.initial_state);
    }
    j["bath"] = {{"lambda", s.lambda}, {"temperature", s.temperature}, {"pv_points", s.pv_points}};
    if (s.pv_cutoff) {
        j["bath"]["pv_cutoff"] = *s.pv_cutoff;
    }
    j["generator"] = {{"kind", std::string(to_string(s.generator.kind))},
                      {"clustering_threshold", s.generator.clustering_threshold},
                      {"pauli_blocked", s.generator.pauli_blocked},
                      {"lamb_shift", s.generator.lamb_shift},
                      {"physicality_tol", s.generator.physicality_tol}};
    json sched;
    sched["t_end"] = s.schedule.t_end ? json(*s.schedule.t_end) : json(nullptr);
    sched["output_stride"] =
        s.schedule.output_stride ? json(*s.schedule.output_stride) : json(nullptr);
    sched["rtol"] = s.schedule.integrator.rtol;
    sched["atol"] = s.schedule.integrator.atol;
    sched["copropagate_hole"] = s.schedule.copropagate_hole;
    sched["verify_expm"] = s.schedule.verify_expm;
    j["schedule"] = sched;
    return j;
}

std::string dump_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

// ------------------------------------------------------------------ builtins

Scenario builtin_three_level(MasterEquation kind) {
    Scenario s;
    s.name = "three-level";
    s.hamiltonian = SystemHamiltonian(std::vector<double>{-0.5, 0.0, 0.5});
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 2) = a(2, 1) = 1.0;
    s.coupling_operators.emplace_back("A", a);
    s.chi = 1.0;
    s.initial_state = Matrix::Zero(3, 3);
    s.initial_state(2, 2) = 1.0;
    s.lambda = 0.01;
    s.temperature = 50.0;
    s.generator.kind = kind;
    s.generator.chi = s.chi;
    return s;
}

Scenario builtin_benzene(MasterEquation kind, double clustering_threshold) {
    Scenario s;
    s.name = "benzene";
    s.hamiltonian =
        SystemHamiltonian(std::vector<double>{-0.492, -0.323, -0.323, 0.168, 0.168, 0.428});
    Matrix a = Matrix::Zero(6, 6);
    const int pairs[8][2] = {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 5}, {4, 5}};
    for (const auto& p : pairs) {
        a(p[0], p[1]) = 1.0;
        a(p[1], p[0]) = 1.0;
    }
    s.coupling_operators.emplace_back("A", a);
    s.chi = 2.0;
    s.initial_state = Matrix::Zero(6, 6);
    const double occ[6] = {2, 1, 1, 1, 1, 0};
    for (int k = 0; k < 6; ++k) {
        s.initial_state(k, k) = occ[k];
    }
    s.lambda = 0.01;
    s.temperature = 50.0;
    s.generator.kind = kind;
    s.generator.clustering_threshold = clustering_threshold;
    s.generator.chi = s.chi;
    return s;
}

std::vector<std::string> builtin_names() { return {"three-level", "benzene"}; }

Scenario builtin(std::string_view name) {
    if (name == "three-level") {
        return builtin_three_level();
    }
    if (name == "benzene") {
        return builtin_benzene();
    }
    throw ConfigError("unknown built-in scenario '" + std::string(name) +
                      "' (expected three-level or benzene)");
}

}  // namespace fermidyn
