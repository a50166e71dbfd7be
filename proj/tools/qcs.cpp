// qcs: states, amplitude tables, the full pipeline, and figure sweeps.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qcs/qcs.hpp"

using namespace qcs;
using json = nlohmann::json;

namespace {

struct Options {
    int n = 4;
    std::uint64_t seed = 1;
    std::string out;
    std::string format;
    double omega = 1.0;
    int shots = 10000;
    int rounds = 10;
    int grid = 0;
    std::string kind;
    std::string basis = "z";
    std::string phi = "0.9pi";
    double t = 1.0;
    int k = -1;
    int restarts = 20;
    double cap = 1.0;
    std::vector<double> fidelities{0.9, 0.95, 0.99, 0.999, 1.0};
};

std::string command_line;

double parse_angle(std::string s) {
    double scale = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        s.resize(s.size() - 2);
        scale = std::numbers::pi;
        if (s.empty() || s == "+" || s == "-") {
            s += "1";
        }
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != s.size() || s.empty()) {
        throw InvalidArgument("cannot parse angle '" + s + "'");
    }
    return v * scale;
}

/// Rows of JSON scalars, written as CSV or as a JSON object with a header.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

std::string csv_cell(const json &v) {
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

json header(const Options &o) {
    return {{"tool", "qcs"}, {"version", QCS_VERSION}, {"command", command_line}, {"seed", o.seed}};
}

void emit(const Options &o, const std::string &fmt, const Table *table, const json *doc) {
    std::ostringstream os;
    if (fmt == "csv") {
        if (!table) {
            throw InvalidArgument("this command has no csv output");
        }
        os << "# qcs " << QCS_VERSION << "\n# command: " << command_line << "\n# seed: " << o.seed << "\n";
        for (std::size_t c = 0; c < table->columns.size(); ++c) {
            os << (c ? "," : "") << table->columns[c];
        }
        os << "\n";
        for (const auto &r : table->rows) {
            for (std::size_t c = 0; c < r.size(); ++c) {
                os << (c ? "," : "") << csv_cell(r[c]);
            }
            os << "\n";
        }
    } else if (fmt == "json") {
        json j{{"header", header(o)}};
        if (doc) {
            j["data"] = *doc;
        } else {
            json rows = json::array();
            for (const auto &r : table->rows) {
                json obj;
                for (std::size_t c = 0; c < r.size(); ++c) {
                    obj[table->columns[c]] = r[c];
                }
                rows.push_back(std::move(obj));
            }
            j["data"] = std::move(rows);
        }
        os << j.dump(2) << "\n";
    } else {
        throw InvalidArgument("--format must be csv or json");
    }
    if (o.out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            throw InvalidArgument("cannot open " + o.out);
        }
        f << os.str();
    }
}

StateVector build_state(const Options &o, const std::string &kind, Rng &rng) {
    if (kind == "supersinglet") {
        return supersinglet(o.n);
    }
    if (kind == "homogeneous") {
        const HomogeneousSinglet h = homogeneous_singlet(o.n, rng);
        std::cerr << "constraint residual " << format_double(h.constraint_residual) << " after " << h.attempts
                  << " attempt(s)\n";
        return h.state;
    }
    if (kind == "dicke") {
        return dicke_state({o.n, o.k < 0 ? o.n / 2 : o.k});
    }
    if (kind == "random-singlet") {
        return random_singlet(o.n, rng);
    }
    throw InvalidArgument("unknown state kind '" + kind + "'");
}

std::string axis_label(std::size_t index, int n, Axis axis) {
    std::string s = basis_label(index, n);
    const char up = axis == Axis::X ? '+' : axis == Axis::Y ? 'r' : '0';
    const char down = axis == Axis::X ? '-' : axis == Axis::Y ? 'l' : '1';
    for (char &c : s) {
        c = c == '0' ? up : down;
    }
    return s;
}

int cmd_state(const Options &o) {
    Rng rng(o.seed);
    const std::string kind = o.kind.empty() ? "supersinglet" : o.kind;
    const StateVector s = build_state(o, kind, rng);
    const Axis axis = parse_axis(o.basis);
    std::cerr << "norm " << format_double(s.amps().norm()) << "\nS^2 " << format_double(spin_squared_expectation(s))
              << "\nsinglet residual " << format_double(singlet_residual(s)) << "\n";
    // Coordinates in the chosen axis eigenbasis.
    const StateVector r = apply_global_rotation(s, axis_frame(axis).adjoint());
    for (std::size_t k = 0; k < r.dim(); ++k) {
        if (std::abs(r[k]) > 1e-12) {
            std::cerr << "  |" << axis_label(k, s.n_qubits(), axis) << "> " << format_double(r[k].real()) << " "
                      << format_double(r[k].imag()) << "\n";
        }
    }
    Table t{{"index", "label", "re", "im"}, {}};
    for (std::size_t k = 0; k < s.dim(); ++k) {
        t.rows.push_back({k, basis_label(k, s.n_qubits()), s[k].real(), s[k].imag()});
    }
    const json doc = to_json(s);
    emit(o, o.format.empty() ? "json" : o.format, &t, &doc);
    return 0;
}

int cmd_amps(const Options &o) {
    Rng rng(o.seed);
    const std::string kind = o.kind.empty() ? "supersinglet" : o.kind;
    const StateVector s = build_state(o, kind, rng);
    const AmplitudeTable direct = amplitude_direct(s);
    const AmplitudeTable corr = amplitude_correlation(s);
    const AmplitudeTable post = amplitude_postprocessed(s);
    const bool closed = kind == "supersinglet";
    const AmplitudeTable cf = closed ? amplitude_closed_form(o.n) : corr;
    double worst = std::max({direct.max_abs_difference(corr), post.max_abs_difference(corr)});
    if (closed) {
        worst = std::max(worst, cf.max_abs_difference(corr));
    }
    Table t{{"party", "group", "direct", "correlation", "postprocessed"}, {}};
    if (closed) {
        t.columns.push_back("closed_form");
    }
    for (int q = 2; q <= o.n; ++q) {
        std::vector<json> row{q, to_string(group_of(q, o.n)), direct.at(q), corr.at(q), post.at(q)};
        if (closed) {
            row.push_back(cf.at(q));
        }
        t.rows.push_back(std::move(row));
    }
    std::vector<json> sum{"sum", "", direct.sum(), corr.sum(), post.sum()};
    if (closed) {
        sum.push_back(cf.sum());
    }
    t.rows.push_back(std::move(sum));
    emit(o, o.format.empty() ? "csv" : o.format, &t, nullptr);
    if (worst > 1e-10) {
        std::cerr << "route disagreement " << format_double(worst) << "\n";
        return 1;
    }
    return 0;
}

int cmd_pipeline(const Options &o) {
    PipelineConfig cfg;
    cfg.n_qubits = o.n;
    cfg.phi = parse_angle(o.phi);
    cfg.rounds = o.rounds;
    cfg.shots = o.shots;
    cfg.omega = o.omega;
    cfg.t_true = o.t;
    cfg.distillation_cap = o.cap;
    const PipelineReport r = run_pipeline(cfg, o.seed);
    if (!r.purification_converged) {
        std::cerr << "warning: purification did not reach F >= " << cfg.converged_fidelity
                  << "; see the per-round trace in the report\n";
    }
    std::cerr << "pair F " << format_double(r.pair_fidelity) << ", distilled F " << format_double(r.distilled_fidelity)
              << ", predicted dt " << format_double(r.predicted.delta_t_total) << ", all within "
              << (r.all_within ? "yes" : "no") << "\n";
    Table t{{"party", "group", "t_estimate", "abs_error", "tolerance", "within"}, {}};
    for (const auto &p : r.outcomes) {
        t.rows.push_back({p.party, to_string(group_of(p.party, o.n)), p.t_estimate, p.abs_error, r.tolerance,
                          p.within_tolerance ? "yes" : "no"});
    }
    const json doc = to_json(r);
    emit(o, o.format.empty() ? "json" : o.format, &t, &doc);
    return 0;
}

int cmd_sweep(const Options &o) {
    Table t;
    if (o.kind == "purify") {
        const auto traces = purify_sweep(linear_grid(0.0, std::numbers::pi, o.grid > 0 ? o.grid : 33), o.rounds);
        t.columns = {"phi", "round", "fidelity", "success_prob", "zz"};
        for (const auto &tr : traces) {
            for (const auto &r : tr.rounds) {
                t.rows.push_back({tr.phi, r.round, r.fidelity, r.success_prob, r.zz});
            }
        }
    } else if (o.kind == "dephase") {
        t.columns = {"N", "p", "party", "group", "amplitude"};
        for (int n : {4, 6, 8}) {
            for (double p : linear_grid(0.0, 1.0, o.grid > 0 ? o.grid : 21)) {
                for (const auto &e : dephased_amplitudes(n, p).entries) {
                    t.rows.push_back({n, p, e.party, to_string(group_of(e.party, n)), e.amplitude});
                }
            }
        }
    } else if (o.kind == "error") {
        const auto rows = error_sweep(log_shot_grid(0, 6, o.grid > 0 ? o.grid : 61), o.fidelities, o.omega);
        t.columns = {"M", "F", "dt_omega", "dt_cs_ps", "dt_sr_fs"};
        for (const auto &r : rows) {
            t.rows.push_back({r.shots, r.fidelity, r.dt_omega, r.dt_cs_ps, r.dt_sr_fs});
        }
    } else if (o.kind == "optimize") {
        const int steps = o.grid > 0 ? o.grid : 64;
        const ScanResult r = scan_n4(steps, steps);
        t.columns = {"theta", "phi", "objective"};
        for (const auto &p : r.points) {
            t.rows.push_back({p.theta, p.phi, p.valid ? json(p.objective) : json("nan")});
        }
        Rng rng(o.seed);
        for (int n : {4, 6}) {
            Rng nr = rng.split(static_cast<std::uint64_t>(n));
            const OptimizeResult opt = optimize_singlet(n, o.restarts, nr);
            std::cerr << "N=" << n << " optimizer best " << format_double(opt.objective) << ", supersinglet "
                      << format_double(objective_geomean(supersinglet(n))) << "\n";
        }
        std::cerr << "scan best " << format_double(r.best) << " at theta " << format_double(r.argmax.front().theta)
                  << "\n";
    } else {
        throw InvalidArgument("--kind must be purify, dephase, error or optimize");
    }
    emit(o, o.format.empty() ? "csv" : o.format, &t, nullptr);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    for (int i = 0; i < argc; ++i) {
        command_line += (i ? " " : "") + std::string(i ? argv[i] : "qcs");
    }
    CLI::App app{"Multiparty clock synchronization simulator"};
    app.set_version_flag("--version", QCS_VERSION);
    app.set_config("--config", "", "key=value file; command-line flags win");
    app.require_subcommand(1);
    Options o;
    app.add_option("--n", o.n, "number of qubits");
    app.add_option("--seed", o.seed, "RNG seed");
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--omega", o.omega, "clock frequency");
    app.add_option("--shots", o.shots, "measurement shots M");
    app.add_option("--rounds", o.rounds, "purification rounds");
    app.add_option("--grid", o.grid, "sweep grid points");
    app.add_option("--kind", o.kind, "state kind or sweep kind");
    app.add_option("--basis", o.basis, "z, x or y labels for state dumps")->check(CLI::IsMember({"z", "x", "y"}));
    app.add_option("--phi", o.phi, "injected phase, e.g. 0.9pi");
    app.add_option("--t", o.t, "true time");
    app.add_option("--k", o.k, "excitations for dicke states");
    app.add_option("--restarts", o.restarts, "optimizer restarts");
    app.add_option("--cap", o.cap, "distillation fidelity cap");
    app.add_option("--fidelities", o.fidelities, "fidelity list for the error sweep");

    auto *state = app.add_subcommand("state", "build and serialize a singlet state")->fallthrough();
    auto *amps = app.add_subcommand("amps", "amplitude table from every route")->fallthrough();
    auto *pipeline = app.add_subcommand("pipeline", "distribute, purify, project, measure, estimate")->fallthrough();
    auto *sweep = app.add_subcommand("sweep", "figure data: purify, dephase, error, optimize")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*state) {
            return cmd_state(o);
        }
        if (*amps) {
            return cmd_amps(o);
        }
        if (*pipeline) {
            return cmd_pipeline(o);
        }
        if (*sweep) {
            return cmd_sweep(o);
        }
    } catch (const InvalidArgument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolverFailure &e) {
        std::cerr << "solver failure: " << e.what() << " (best residual " << format_double(e.best_residual())
                  << ")\n";
        return 3;
    } catch (const InvariantViolation &e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
