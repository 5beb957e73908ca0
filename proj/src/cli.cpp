// cli.cpp — Subcommand dispatch, reports and exit-code mapping

#include "fermidyn/cli.hpp"
#include "fermidyn/quadrature.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fermidyn {

namespace {

constexpr double kUnitalTol = 1e-12;

struct RunFlags {
    std::string out_dir;
    std::string stem;
    bool verify{false};
    bool no_hole{false};
    bool serial{false};
    double t_end{0.0};
    double physicality_tol{-1.0};
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--out", f.out_dir, "Output directory (default $FERMIDYN_OUTPUT_DIR or .)");
    cmd->add_option("--stem", f.stem, "Output file stem (default: scenario name)");
    cmd->add_flag("--verify", f.verify, "Compare against matrix-exponential propagation");
    cmd->add_flag("--no-hole", f.no_hole, "Skip hole-RDM co-propagation");
    cmd->add_flag("--serial", f.serial, "Build rate tables without OpenMP");
    cmd->add_option("--t-end", f.t_end, "Final time in atomic units (default 20/Gamma_slowest)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--physicality-tol", f.physicality_tol,
                    "Band around [0, chi] accepted by Pauli factors")
        ->check(CLI::NonNegativeNumber);
}

void apply_run_flags(Scenario& s, const RunFlags& f) {
    if (f.verify) {
        s.schedule.verify_expm = true;
    }
    if (f.no_hole) {
        s.schedule.copropagate_hole = false;
    }
    if (f.t_end > 0.0) {
        s.schedule.t_end = f.t_end;
        s.schedule.output_stride.reset();
    }
    if (f.physicality_tol >= 0.0) {
        s.generator.physicality_tol = f.physicality_tol;
    }
}

Execution execution(bool serial) { return serial ? Execution::serial : Execution::parallel; }

int finish_run(const Scenario& s, const RunFlags& f, std::ostream& out) {
    const RunResult r = run_scenario(s, execution(f.serial));
    const std::filesystem::path dir =
        f.out_dir.empty() ? default_output_dir() : std::filesystem::path(f.out_dir);
    const WrittenFiles files = write_outputs(r, dir, f.stem.empty() ? s.name : f.stem);
    out << run_report(r);
    out << "trajectory: " << files.csv.string() << "\n";
    out << "metadata:   " << files.meta.string() << "\n";
    return kExitOk;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(item, &pos));
            if (pos != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ConfigError(what + ": cannot read '" + item + "' as a number");
        }
    }
    if (v.empty()) {
        throw ConfigError(what + ": empty list");
    }
    return v;
}

std::string format_populations(const RealVector& p) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << "(";
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        os << (k ? ", " : "") << p(k);
    }
    os << ")";
    return os.str();
}

std::string audit_text(const Scenario& s, const GeneratorSpec& spec, bool superop) {
    const Matrix h = s.hamiltonian.matrix();
    std::ostringstream os;
    os << "scenario " << s.name << ": me=" << to_string(spec.kind())
       << " blocked=" << (spec.pauli_blocked() ? "yes" : "no") << " chi=" << s.chi
       << " T=" << s.temperature << " K lambda=" << s.lambda << " Eh\n";
    os << "channels:";
    for (const auto& fc : spec.flat_channels()) {
        os << " " << fc.omega;
    }
    os << "\n";
    if (spec.clusters()) {
        os << "clusters (threshold " << spec.clusters()->threshold << "):";
        for (const auto& c : spec.clusters()->clusters) {
            os << " {";
            for (std::size_t k = 0; k < c.members.size(); ++k) {
                os << (k ? ", " : "") << c.members[k];
            }
            os << "}";
        }
        os << "\n";
    }
    const double u = unitality_residual(spec, h);
    os << std::scientific << std::setprecision(6);
    os << "unitality residual ||L(chi*1)||_max = " << u << " -> "
       << (u < kUnitalTol ? "unital" : "NON-UNITAL") << "\n";
    if (!spec.pauli_blocked()) {
        os << constraint_report_text(constraint_residual(spec));
    }
    if (superop) {
        if (spec.pauli_blocked()) {
            os << "superoperator: not available for Pauli-blocked generators\n";
        } else {
            const Matrix l = superoperator_matrix(h, spec);
            const Eigen::Index d = spec.dim();
            Eigen::VectorXcd id = Eigen::VectorXcd::Zero(d * d);
            for (Eigen::Index k = 0; k < d; ++k) {
                id(k * d + k) = 1.0;
            }
            const double trace_null = (id.adjoint() * l).cwiseAbs().maxCoeff();
            const double unital = (l * (s.chi * id)).cwiseAbs().maxCoeff();
            os << "superoperator " << d * d << "x" << d * d
               << ": trace functional residual ||vec(1)^dag L||_max = " << trace_null
               << ", ||L vec(chi*1)||_max = " << unital << "\n";
        }
    }
    return os.str();
}

Scenario bench_scenario(const std::string& system, const std::string& me, bool blocked,
                        double threshold, bool lamb, double temperature) {
    const MasterEquation kind = parse_master_equation(me);
    Scenario s = system == "three-level" ? builtin_three_level(kind) : builtin_benzene(kind);
    s.generator.kind = kind;
    s.generator.pauli_blocked = blocked;
    s.generator.clustering_threshold = threshold;
    s.generator.lamb_shift = lamb;
    if (temperature > 0.0) {
        s.temperature = temperature;
    }
    s.name = system + "-" + std::string(to_string(kind)) + (blocked ? "-blocked" : "");
    return s;
}

}  // namespace

std::string run_report(const RunResult& r) {
    std::ostringstream os;
    const auto pops = eigenbasis_populations(r);
    os << "scenario " << r.scenario.name << ": me=" << to_string(r.spec.kind())
       << " blocked=" << (r.spec.pauli_blocked() ? "yes" : "no") << " chi=" << r.scenario.chi
       << " T=" << r.scenario.temperature << " K\n";
    os << "t_end = " << r.t_end << " (" << r.t_end_source << "), " << r.trajectory.size()
       << " recorded times, " << r.trajectory.stats.accepted << " accepted / "
       << r.trajectory.stats.rejected << " rejected steps\n";
    os << "initial populations " << format_populations(pops.front()) << "\n";
    os << "final populations   " << format_populations(pops.back()) << "\n";
    os << audit_summary_text(r.audit);
    os << std::scientific << std::setprecision(6);
    os << "unitality residual = " << r.unitality << " -> "
       << (r.unitality < kUnitalTol ? "unital" : "NON-UNITAL") << "\n";
    if (r.constraint) {
        os << "constraint residual norm = " << r.constraint->residual_norm
           << ", direct D(1) norm = " << r.constraint->direct_norm << "\n";
    }
    if (r.hole) {
        os << "hole complementarity defect: max " << r.hole->max_defect << ", final "
           << r.hole->defect.back() << "\n";
    }
    if (r.expm_deviation) {
        os << "max population deviation from expm propagation = " << *r.expm_deviation << "\n";
    }
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"fermidyn: fermionic 1-RDM dynamics under Redfield, unified GKSL and universal "
                 "Lindblad master equations",
                 "fermidyn"};
    app.require_subcommand(1);
    app.fallthrough(false);

    // run
    std::string run_file;
    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Propagate a scenario, audit it and write CSV + metadata");
    run->add_option("scenario", run_file, "Scenario file (JSON)")->required();
    add_run_flags(run, run_flags);

    // audit
    std::string audit_file;
    std::string audit_csv;
    bool audit_superop = false;
    auto* audit = app.add_subcommand("audit", "Constraint and unitality report, no propagation");
    audit->add_option("scenario", audit_file, "Scenario file (JSON)")->required();
    audit->add_option("--csv", audit_csv, "Write the per-channel constraint table here");
    audit->add_flag("--superop", audit_superop, "Also check the explicit superoperator");

    // spectra
    std::string spectra_file;
    std::string spectra_out;
    std::string spectra_temps;
    int spectra_points = 201;
    double spectra_max = 0.0;
    bool spectra_xi = false;
    bool spectra_serial = false;
    auto* spectra = app.add_subcommand("spectra", "Dump Gamma-hat(w) and Gamma(w) on a grid");
    spectra->add_option("scenario", spectra_file, "Scenario file (JSON)")->required();
    spectra->add_option("--points", spectra_points, "Grid points on [-wmax, wmax]")
        ->check(CLI::Range(2, 100000));
    spectra->add_option("--omega-max", spectra_max, "Grid half-width in Eh (default 1.5 x max Bohr)")
        ->check(CLI::PositiveNumber);
    spectra->add_option("--temperatures", spectra_temps, "Comma-separated list in K");
    spectra->add_flag("--xi", spectra_xi, "Also evaluate the principal-value part Im Gamma");
    spectra->add_option("--out", spectra_out, "CSV file (default stdout)");
    spectra->add_flag("--serial", spectra_serial, "Evaluate without OpenMP");

    // bench
    std::string bench_system;
    std::string bench_me = "rme";
    bool bench_blocked = false;
    bool bench_lamb = false;
    double bench_threshold = 0.0;
    double bench_temperature = 0.0;
    RunFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "Run a built-in benchmark system");
    bench->add_option("system", bench_system, "three-level or benzene")
        ->required()
        ->check(CLI::IsMember({"three-level", "benzene"}));
    bench->add_option("--me", bench_me, "Master equation")
        ->check(CLI::IsMember({"rme", "ume", "ule"}));
    bench->add_flag("--blocked", bench_blocked, "Pauli-blocked dissipator");
    bench->add_option("--threshold", bench_threshold, "UME clustering threshold in Eh")
        ->check(CLI::NonNegativeNumber);
    bench->add_flag("--lamb", bench_lamb, "Include the Lamb-shift Hamiltonian");
    bench->add_option("--temperature", bench_temperature, "Bath temperature in K")
        ->check(CLI::PositiveNumber);
    add_run_flags(bench, bench_flags);

    // sweep
    std::string sweep_system = "benzene";
    std::string sweep_file;
    std::string sweep_thresholds;
    std::string sweep_temperatures;
    std::string sweep_me;
    std::string sweep_out;
    bool sweep_blocked = false;
    bool sweep_serial = false;
    auto* sw = app.add_subcommand("sweep", "Run a grid of thresholds or temperatures");
    sw->add_option("--system", sweep_system, "Built-in system")
        ->check(CLI::IsMember({"three-level", "benzene"}));
    sw->add_option("--scenario", sweep_file, "Scenario file instead of a built-in system");
    auto* th_opt = sw->add_option("--thresholds", sweep_thresholds, "Comma-separated, Eh (UME)");
    auto* temp_opt = sw->add_option("--temperatures", sweep_temperatures, "Comma-separated, K");
    th_opt->excludes(temp_opt);
    sw->add_option("--me", sweep_me, "Master equation (default: the scenario's)")
        ->check(CLI::IsMember({"rme", "ume", "ule"}));
    sw->add_flag("--blocked", sweep_blocked, "Pauli-blocked dissipator");
    sw->add_option("--out", sweep_out, "Summary CSV (default stdout)");
    sw->add_flag("--serial", sweep_serial, "Run the grid on one thread");

    // export
    std::string export_name;
    std::string export_me;
    std::string export_out;
    double export_threshold = 0.0;
    bool export_blocked = false;
    auto* exp = app.add_subcommand("export", "Write a built-in scenario as a JSON file");
    exp->add_option("system", export_name, "three-level or benzene")
        ->required()
        ->check(CLI::IsMember({"three-level", "benzene"}));
    exp->add_option("--me", export_me, "Master equation")->check(CLI::IsMember({"rme", "ume", "ule"}));
    exp->add_option("--threshold", export_threshold, "UME clustering threshold in Eh")
        ->check(CLI::NonNegativeNumber);
    exp->add_flag("--blocked", export_blocked, "Pauli-blocked dissipator");
    exp->add_option("-o,--out", export_out, "Output file (default stdout)");

    if (!args.empty() && !args.front().starts_with('-')) {
        bool known = false;
        for (const auto* sub : app.get_subcommands({})) {
            known = known || sub->get_name() == args.front();
        }
        if (!known) {
            err << "fermidyn: unknown subcommand '" << args.front() << "'\n\n" << app.help();
            return kExitUsage;
        }
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "fermidyn: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*run) {
            Scenario s = load_scenario(run_file);
            apply_run_flags(s, run_flags);
            return finish_run(s, run_flags, out);
        }
        if (*audit) {
            const Scenario s = load_scenario(audit_file);
            const GeneratorSpec spec = build_generator(s);
            out << audit_text(s, spec, audit_superop);
            if (!audit_csv.empty()) {
                if (spec.pauli_blocked()) {
                    throw ConfigError("--csv: blocked generators have no per-channel constraint");
                }
                std::ofstream f(audit_csv);
                if (!f) {
                    throw ConfigError("cannot write " + audit_csv);
                }
                f << constraint_table_csv(constraint_residual(spec));
            }
            return kExitOk;
        }
        if (*spectra) {
            const Scenario s = load_scenario(spectra_file);
            const RealVector& e = s.hamiltonian.energies();
            const double wmax =
                spectra_max > 0.0 ? spectra_max : 1.5 * std::max(e.maxCoeff() - e.minCoeff(), s.lambda);
            std::vector<double> omegas;
            for (int k = 0; k < spectra_points; ++k) {
                omegas.push_back(-wmax + 2.0 * wmax * k / (spectra_points - 1));
            }
            const std::vector<double> temps = spectra_temps.empty()
                                                  ? std::vector<double>{s.temperature}
                                                  : parse_list(spectra_temps, "--temperatures");
            const auto rows =
                spectral_grid(omegas, temps, s.lambda, spectra_xi, s.pv_points, execution(spectra_serial));
            std::ostringstream os;
            os << "# fermidyn-spectra/1 lambda=" << s.lambda << "\n";
            os << "temperature,omega,gamma_hat,re_gamma" << (spectra_xi ? ",im_gamma" : "") << "\n";
            os << std::setprecision(15);
            for (const auto& r : rows) {
                os << r.temperature << ',' << r.omega << ',' << r.gamma_hat << ',' << r.gamma_real;
                if (spectra_xi) {
                    os << ',' << r.xi;
                }
                os << '\n';
            }
            if (spectra_out.empty()) {
                out << os.str();
            } else {
                std::ofstream f(spectra_out);
                if (!f) {
                    throw ConfigError("cannot write " + spectra_out);
                }
                f << os.str();
                out << "wrote " << rows.size() << " rows to " << spectra_out << "\n";
            }
            return kExitOk;
        }
        if (*bench) {
            Scenario s = bench_scenario(bench_system, bench_me, bench_blocked, bench_threshold,
                                        bench_lamb, bench_temperature);
            apply_run_flags(s, bench_flags);
            return finish_run(s, bench_flags, out);
        }
        if (*sw) {
            if (sweep_thresholds.empty() && sweep_temperatures.empty()) {
                throw ConfigError("sweep: give --thresholds or --temperatures");
            }
            Scenario base = sweep_file.empty() ? builtin(sweep_system) : load_scenario(sweep_file);
            if (!sweep_me.empty()) {
                base.generator.kind = parse_master_equation(sweep_me);
            }
            if (sweep_blocked) {
                base.generator.pauli_blocked = true;
            }
            const bool by_threshold = !sweep_thresholds.empty();
            const std::vector<double> values = by_threshold
                                                   ? parse_list(sweep_thresholds, "--thresholds")
                                                   : parse_list(sweep_temperatures, "--temperatures");
            std::vector<Scenario> grid;
            for (double v : values) {
                Scenario s = base;
                if (by_threshold) {
                    s.generator.clustering_threshold = v;
                } else {
                    s.temperature = v;
                }
                s.schedule.copropagate_hole = false;
                grid.push_back(std::move(s));
            }
            const auto runs = sweep(grid, execution(sweep_serial));
            const std::string csv =
                sweep_summary_csv(runs, by_threshold ? "threshold" : "temperature", values);
            if (sweep_out.empty()) {
                out << csv;
            } else {
                std::ofstream f(sweep_out);
                if (!f) {
                    throw ConfigError("cannot write " + sweep_out);
                }
                f << csv;
                out << "wrote " << runs.size() << " runs to " << sweep_out << "\n";
            }
            return kExitOk;
        }
        if (*exp) {
            Scenario s = builtin(export_name);
            if (!export_me.empty()) {
                s.generator.kind = parse_master_equation(export_me);
            }
            s.generator.clustering_threshold = export_threshold;
            s.generator.pauli_blocked = export_blocked;
            const std::string text = dump_scenario(s);
            if (export_out.empty()) {
                out << text;
            } else {
                std::ofstream f(export_out);
                if (!f) {
                    throw ConfigError("cannot write " + export_out);
                }
                f << text;
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "fermidyn: configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "fermidyn: configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        err << "fermidyn: configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnsupportedOperation& e) {
        err << "fermidyn: unsupported: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StiffnessError& e) {
        err << "fermidyn: integration failed: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const PhysicalityError& e) {
        err << "fermidyn: integration failed: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const quad::QuadratureError& e) {
        err << "fermidyn: quadrature failed: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "fermidyn: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace fermidyn
