#include "scarfsim/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "scarfsim/io.hpp"

namespace scarfsim {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNotApplicable = 4;

std::vector<double> parse_csv_doubles(const std::string& text, std::size_t expect,
                                      const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw PreconditionViolation(what + ": cannot parse '" + item + "' as a number");
        }
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size())
            throw PreconditionViolation(what + ": cannot parse '" + item + "' as a number");
        out.push_back(v);
    }
    if (out.size() != expect)
        throw PreconditionViolation(what + ": expected " + std::to_string(expect) +
                                    " comma-separated values, got " + std::to_string(out.size()));
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw PreconditionViolation("cannot open output file '" + path + "'");
    os << content;
    if (!os) throw PreconditionViolation("failed writing output file '" + path + "'");
}

struct ModelOpts {
    std::string d_csv;
    double K = 0.0;
    double L = 0.0;
    std::string matrix_csv;
    bool no_strict = false;
    bool has_d = false;
    bool has_matrix = false;
};

void attach_model_flags(CLI::App* cmd, ModelOpts& m) {
    cmd->add_option("--d", m.d_csv, "diagonal endowments d1,d2,d3");
    cmd->add_option("--K", m.K, "off-diagonal offset K");
    cmd->add_option("--L", m.L, "off-diagonal offset L");
    cmd->add_option("--matrix", m.matrix_csv, "raw endowment matrix, 9 row-major entries");
    cmd->add_flag("--no-strict", m.no_strict, "allow negative matrix entries");
}

void harvest_model_flags(CLI::App* cmd, ModelOpts& m) {
    m.has_d = cmd->count("--d") > 0;
    m.has_matrix = cmd->count("--matrix") > 0;
}

struct Model {
    EndowmentParams params;
    EndowmentMatrix A;
};

Model model_from_params(const EndowmentParams& p, bool strict) {
    return Model{p, from_params(p, strict)};
}

Model resolve_model(const ModelOpts& m, const std::optional<Model>& from_config) {
    if (m.has_d && m.has_matrix)
        throw PreconditionViolation("give either --d/--K/--L or --matrix, not both");
    if (m.has_matrix) {
        const auto v = parse_csv_doubles(m.matrix_csv, 9, "--matrix");
        EndowmentMatrix A;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A.a(i, j) = v[i * 3 + j];
        return Model{to_params(A), A};
    }
    if (m.has_d) {
        const auto d = parse_csv_doubles(m.d_csv, 3, "--d");
        return model_from_params(EndowmentParams{d[0], d[1], d[2], m.K, m.L}, !m.no_strict);
    }
    if (from_config) return *from_config;
    throw PreconditionViolation("no model given: use --d d1,d2,d3 [--K --L], --matrix, or a config file");
}

std::optional<Model> model_from_json(const json& j, bool strict) {
    if (!j.contains("model")) return std::nullopt;
    const json& jm = j.at("model");
    const bool has_d = jm.contains("d");
    const bool has_matrix = jm.contains("matrix");
    if (has_d == has_matrix)
        throw PreconditionViolation("config model: exactly one of \"d\" or \"matrix\" required");
    if (has_matrix) {
        EndowmentMatrix A;
        const auto& rows = jm.at("matrix");
        if (!rows.is_array() || rows.size() != 3)
            throw PreconditionViolation("config model.matrix must be a 3x3 array");
        for (int i = 0; i < 3; ++i)
            for (int j2 = 0; j2 < 3; ++j2) A.a(i, j2) = rows.at(i).at(j2).get<double>();
        return Model{to_params(A), A};
    }
    const auto& d = jm.at("d");
    if (!d.is_array() || d.size() != 3)
        throw PreconditionViolation("config model.d must hold 3 numbers");
    EndowmentParams p{d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>(),
                      jm.value("K", 0.0), jm.value("L", 0.0)};
    return model_from_params(p, strict);
}

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw PreconditionViolation("cannot open config file '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw PreconditionViolation("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// ----- classify --------------------------------------------------------------

int cmd_classify(const ModelOpts& mo) {
    const Model m = resolve_model(mo, std::nullopt);
    const StabilityReport rep = stability_report(m.params);
    std::cout << io::to_json(rep) << "\n";
    std::cerr << "H=" << format_double(rep.H) << " Hhat=" << format_double(rep.Hhat)
              << " S=" << format_double(rep.S) << " " << to_string(rep.local_class)
              << " globally_stable=" << (rep.globally_stable ? "true" : "false") << "\n";
    return kExitOk;
}

// ----- simulate --------------------------------------------------------------

struct SimulateOpts {
    ModelOpts model;
    std::string config_path;
    std::string p0_csv;
    IntegrationConfig ic;
    std::string out_path;
    std::string format = "csv";
};

int cmd_simulate(CLI::App* cmd, SimulateOpts& o) {
    std::optional<Model> config_model;
    std::optional<Vec3> p0;

    if (cmd->count("--p0")) {
        const auto v = parse_csv_doubles(o.p0_csv, 3, "--p0");
        p0 = Vec3{v[0], v[1], v[2]};
    }

    // config file fills in whatever no flag pinned down
    if (!o.config_path.empty()) {
        const json j = load_json_file(o.config_path);
        config_model = model_from_json(j, !o.model.no_strict);
        if (j.contains("gamma") && cmd->count("--gamma") == 0)
            o.ic.gamma = j.at("gamma").get<double>();
        if (j.contains("initial") && !p0) {
            const auto& ji = j.at("initial");
            if (!ji.is_array() || ji.size() != 3)
                throw PreconditionViolation("config initial must hold 3 numbers");
            p0 = Vec3{ji.at(0).get<double>(), ji.at(1).get<double>(), ji.at(2).get<double>()};
        }
        if (j.contains("integration")) {
            const json& g = j.at("integration");
            auto set_d = [&](const char* flag, const char* key, double& target) {
                if (cmd->count(flag) == 0 && g.contains(key)) target = g.at(key).get<double>();
            };
            set_d("--t0", "t0", o.ic.t0);
            set_d("--t1", "t1", o.ic.t1);
            set_d("--rel-tol", "rel_tol", o.ic.rel_tol);
            set_d("--abs-tol", "abs_tol", o.ic.abs_tol);
            set_d("--max-step", "max_step", o.ic.max_step);
            set_d("--boundary-floor", "boundary_floor", o.ic.boundary_floor);
            set_d("--convergence-radius", "convergence_radius", o.ic.convergence_radius);
            if (cmd->count("--boundary-trigger") == 0 && g.contains("boundary_trigger_count"))
                o.ic.boundary_trigger_count = g.at("boundary_trigger_count").get<int>();
            if (cmd->count("--max-samples") == 0 && g.contains("max_samples"))
                o.ic.max_samples = g.at("max_samples").get<std::uint64_t>();
            if (cmd->count("--renormalize") == 0 && g.contains("renormalize"))
                o.ic.renormalize_invariant = g.at("renormalize").get<bool>();
        }
        if (j.contains("output")) {
            const json& g = j.at("output");
            if (o.out_path.empty()) o.out_path = g.value("path", std::string{});
            if (cmd->count("--format") == 0) o.format = g.value("format", o.format);
        }
    }

    const Model m = resolve_model(o.model, config_model);
    if (!p0) throw PreconditionViolation("no initial prices: use --p0 p1,p2,p3 or config initial");
    if (o.format != "csv" && o.format != "json")
        throw PreconditionViolation("--format must be csv or json");

    const int zeros = ((*p0)[0] == 0.0) + ((*p0)[1] == 0.0) + ((*p0)[2] == 0.0);
    const PriceVector start = (zeros == 1) ? PriceVector::boundary((*p0)[0], (*p0)[1], (*p0)[2])
                                           : PriceVector::interior((*p0)[0], (*p0)[1], (*p0)[2]);

    const Trajectory traj = integrate(start, m.A, o.ic);

    const std::string payload = (o.format == "csv") ? io::to_csv(traj) : io::to_json(traj);
    if (o.out_path.empty())
        std::cout << payload;
    else
        write_file(o.out_path, payload);

    std::cerr << "termination=" << to_string(traj.termination) << " t_end="
              << format_double(traj.back().t) << " p_end=(" << format_double(traj.back().p[0])
              << "," << format_double(traj.back().p[1]) << "," << format_double(traj.back().p[2])
              << ") samples=" << traj.samples.size()
              << " max_drift=" << format_double(traj.max_integral_drift);
    if (!traj.message.empty()) std::cerr << " message=\"" << traj.message << "\"";
    std::cerr << "\n";
    return traj.termination == Termination::StepFailure ? kExitNumerical : kExitOk;
}

// ----- edge ------------------------------------------------------------------

int cmd_edge(const ModelOpts& mo, int edge) {
    const Model m = resolve_model(mo, std::nullopt);
    const EdgeFixedPoint fp = edge_fixed_point(edge, m.params);
    const EdgeMinExcess me = edge_min_excess(edge, m.A);
    std::cout << io::to_json(fp, me) << "\n";
    std::cerr << "edge " << edge << ": point=(" << format_double(fp.point.p1) << ","
              << format_double(fp.point.p2) << "," << format_double(fp.point.p3)
              << ") own_excess=" << format_double(fp.own_excess) << " prediction="
              << (fp.locally_stable_on_simplex ? "Attracting" : "Repelling") << "\n";
    return kExitOk;
}

// ----- fig1 ------------------------------------------------------------------

int cmd_fig1(const std::string& outdir) {
    const Figure1Result r = reproduce_figure1();
    const std::string base = outdir.empty() ? std::string(".") : outdir;
    write_file(base + "/fig1_forward.csv", io::to_csv(r.forward));
    write_file(base + "/fig1_backward.csv", io::to_csv(r.backward));
    write_file(base + "/fig1_verdict.json", io::to_json(r) + "\n");
    std::cout << io::to_json(r) << "\n";
    std::cerr << (r.pass ? "PASS" : "FAIL") << ": " << r.detail << "\n";
    return kExitOk;
}

// ----- sweep -----------------------------------------------------------------

Region region_from_string(const std::string& s) {
    if (s == "any") return Region::Any;
    if (s == "stable") return Region::GloballyStable;
    if (s == "conjecture") return Region::Conjecture;
    if (s == "unstable") return Region::Unstable;
    throw PreconditionViolation("unknown region '" + s + "' (any|stable|conjecture|unstable)");
}

int cmd_sweep(CLI::App* cmd, const std::string& config_path, SweepConfig& cfg,
              const std::string& region_str, const std::string& out_prefix) {
    if (!config_path.empty()) {
        const json j = load_json_file(config_path);
        SweepConfig file_cfg;
        file_cfg.sample_count = j.value("sample_count", file_cfg.sample_count);
        file_cfg.seed = j.value("seed", file_cfg.seed);
        if (j.contains("region")) file_cfg.region = region_from_string(j.at("region").get<std::string>());
        file_cfg.starts_per_sample = j.value("starts_per_sample", file_cfg.starts_per_sample);
        file_cfg.t_max = j.value("t_max", file_cfg.t_max);
        file_cfg.convergence_radius = j.value("convergence_radius", file_cfg.convergence_radius);
        file_cfg.min_d = j.value("min_d", file_cfg.min_d);
        file_cfg.start_margin = j.value("start_margin", file_cfg.start_margin);
        file_cfg.jobs = j.value("jobs", file_cfg.jobs);
        // flags win
        if (cmd->count("--samples")) file_cfg.sample_count = cfg.sample_count;
        if (cmd->count("--seed")) file_cfg.seed = cfg.seed;
        if (cmd->count("--region")) file_cfg.region = region_from_string(region_str);
        if (cmd->count("--starts")) file_cfg.starts_per_sample = cfg.starts_per_sample;
        if (cmd->count("--t-max")) file_cfg.t_max = cfg.t_max;
        if (cmd->count("--radius")) file_cfg.convergence_radius = cfg.convergence_radius;
        if (cmd->count("--min-d")) file_cfg.min_d = cfg.min_d;
        if (cmd->count("--start-margin")) file_cfg.start_margin = cfg.start_margin;
        if (cmd->count("--jobs")) file_cfg.jobs = cfg.jobs;
        cfg = file_cfg;
    } else {
        cfg.region = region_from_string(region_str);
    }

    const SweepOutcome out = conjecture_sweep(cfg, [](int done, int total) {
        if (done % 10 == 0 || done == total)
            std::cerr << "sweep: " << done << "/" << total << " samples\r" << std::flush;
    });
    std::cerr << "\n";

    const std::string prefix = out_prefix.empty() ? std::string("sweep") : out_prefix;
    write_file(prefix + ".jsonl", io::to_jsonl(out));
    write_file(prefix + "_summary.json", io::summary_json(out) + "\n");

    std::cerr << "sweep done: " << out.records.size() << " trajectories, converged "
              << out.converged << ", time_exhausted " << out.time_exhausted
              << ", cycle_suspected " << out.cycle_suspected << ", other " << out.other << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"scarfsim: three-commodity exchange-economy dynamics under dp_i/dt = p_i^g E_i"};
    app.require_subcommand(1);

    ModelOpts classify_model;
    auto* classify = app.add_subcommand("classify", "closed-form stability report for an economy");
    attach_model_flags(classify, classify_model);

    SimulateOpts sim;
    auto* simulate = app.add_subcommand("simulate", "integrate the price dynamics");
    attach_model_flags(simulate, sim.model);
    simulate->add_option("--config", sim.config_path, "JSON run config (flags win)");
    simulate->add_option("--gamma", sim.ic.gamma, "price exponent gamma (default 1)");
    simulate->add_option("--p0", sim.p0_csv, "initial prices p1,p2,p3");
    simulate->add_option("--t0", sim.ic.t0, "start time");
    simulate->add_option("--t1", sim.ic.t1, "end time (t1 < t0 integrates backward)");
    simulate->add_option("--rel-tol", sim.ic.rel_tol, "relative tolerance");
    simulate->add_option("--abs-tol", sim.ic.abs_tol, "absolute tolerance");
    simulate->add_option("--max-step", sim.ic.max_step, "max step size");
    simulate->add_option("--boundary-floor", sim.ic.boundary_floor,
                         "stop when a price falls below this (0 disables)");
    simulate->add_option("--boundary-trigger", sim.ic.boundary_trigger_count,
                         "how many prices must fall below the floor (1-3)");
    simulate->add_option("--convergence-radius", sim.ic.convergence_radius,
                         "stop distance to the equilibrium ray");
    simulate->add_option("--max-samples", sim.ic.max_samples, "sample cap");
    simulate->add_flag("--renormalize", sim.ic.renormalize_invariant,
                       "rescale each step to hold the first integral exactly");
    simulate->add_option("--out", sim.out_path, "output file (default stdout)");
    simulate->add_option("--format", sim.format, "csv or json (default csv)");

    ModelOpts edge_model;
    int edge_index = 1;
    auto* edge = app.add_subcommand("edge", "edge fixed point and edge excess-demand minimum");
    attach_model_flags(edge, edge_model);
    edge->add_option("--edge", edge_index, "edge index 1-3 (commodity with zero price)")
        ->required();

    std::string fig1_outdir = ".";
    auto* fig1 = app.add_subcommand("fig1", "run the benchmark experiment and write its files");
    fig1->add_option("--outdir", fig1_outdir, "output directory (default .)");

    SweepConfig sweep_cfg;
    std::string sweep_config_path, sweep_region = "conjecture", sweep_out = "sweep";
    auto* sweep = app.add_subcommand("sweep", "sample economies and tabulate gamma=1 behavior");
    sweep->add_option("--config", sweep_config_path, "JSON sweep config (flags win)");
    sweep->add_option("-n,--samples", sweep_cfg.sample_count, "number of sampled economies");
    sweep->add_option("--seed", sweep_cfg.seed, "RNG seed");
    sweep->add_option("--region", sweep_region, "any|stable|conjecture|unstable");
    sweep->add_option("--starts", sweep_cfg.starts_per_sample, "starts per economy");
    sweep->add_option("--t-max", sweep_cfg.t_max, "integration window per trajectory");
    sweep->add_option("--radius", sweep_cfg.convergence_radius, "convergence radius");
    sweep->add_option("--min-d", sweep_cfg.min_d, "lower bound on sampled d_i");
    sweep->add_option("--start-margin", sweep_cfg.start_margin, "min coordinate of sampled starts");
    sweep->add_option("--jobs", sweep_cfg.jobs, "worker threads");
    sweep->add_option("--out", sweep_out, "output prefix (default 'sweep')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*classify) {
            harvest_model_flags(classify, classify_model);
            return cmd_classify(classify_model);
        }
        if (*simulate) {
            harvest_model_flags(simulate, sim.model);
            return cmd_simulate(simulate, sim);
        }
        if (*edge) {
            harvest_model_flags(edge, edge_model);
            return cmd_edge(edge_model, edge_index);
        }
        if (*fig1) return cmd_fig1(fig1_outdir);
        if (*sweep) return cmd_sweep(sweep, sweep_config_path, sweep_cfg, sweep_region, sweep_out);
    } catch (const NotApplicable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotApplicable;
    } catch (const SamplingExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}

}  // namespace scarfsim
