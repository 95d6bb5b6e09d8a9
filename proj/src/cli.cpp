#include "dualteach/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "dualteach/dynamics.hpp"
#include "dualteach/experiment.hpp"
#include "json.hpp"

namespace dualteach {

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoull(tok));
    return out;
}

// JSON config file first, then command-line flags on top (flags win).
void apply_json_config(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("dataset")) cfg.dataset_path = j["dataset"].get<std::string>();
    if (j.contains("dataset_name")) cfg.dataset_name = j["dataset_name"].get<std::string>();
    if (j.contains("synthetic")) {
        const auto& s = j["synthetic"];
        cfg.synthetic = SyntheticSpec{s.at("n").get<std::size_t>(), s.at("dim").get<std::size_t>(),
                                      s.at("separation").get<double>(), s.at("flip").get<double>()};
    }
    auto parse_methods = [&](const nlohmann::json& v) {
        cfg.methods.clear();
        for (const auto& m : v) {
            auto parsed = method_from_string(m.get<std::string>());
            if (!parsed) throw std::invalid_argument("unknown method in config");
            cfg.methods.push_back(*parsed);
        }
    };
    if (j.contains("methods")) parse_methods(j["methods"]);
    if (j.contains("bases")) {
        cfg.bases.clear();
        for (const auto& b : j["bases"]) {
            auto parsed = learner_from_string(b.get<std::string>());
            if (!parsed) throw std::invalid_argument("unknown base learner in config");
            cfg.bases.push_back(*parsed);
        }
    }
    if (j.contains("teacher_mode")) {
        auto parsed = teacher_mode_from_string(j["teacher_mode"].get<std::string>());
        if (!parsed) throw std::invalid_argument("unknown teacher_mode in config");
        cfg.teacher_mode = *parsed;
    }
    if (j.contains("ratios")) cfg.ratios = j["ratios"].get<std::vector<double>>();
    if (j.contains("train_fraction")) cfg.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("max_generations")) cfg.max_generations = j["max_generations"].get<std::size_t>();
    if (j.contains("gate_sum")) cfg.gate_sum = j["gate_sum"].get<double>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
}

struct CommonFlags {
    std::string config_path, dataset, synthetic, method, base, teacher_mode, ratio, ratios, seed,
        seeds, out;
    std::size_t max_generations = 0;
    double gate_sum = -1.0, train_fraction = -1.0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--dataset", f.dataset, "LIBSVM-format dataset file");
    cmd->add_option("--synthetic", f.synthetic,
                    "synthetic data spec n,dim,separation,flip (two gaussians)");
    cmd->add_option("--method", f.method,
                    "comma list of dual_teaching|self_training|co_training|supervised");
    cmd->add_option("--base", f.base, "comma list of base learners: lr|svm|ada");
    cmd->add_option("--teacher-mode", f.teacher_mode,
                    "equal_weight|balanced|balanced_tuned (default balanced_tuned)");
    cmd->add_option("--ratio", f.ratio, "labeled ratio in (0,1]");
    cmd->add_option("--ratios", f.ratios, "comma list of labeled ratios");
    cmd->add_option("--seed", f.seed, "run seed");
    cmd->add_option("--seeds", f.seeds, "comma list of run seeds");
    cmd->add_option("--train-fraction", f.train_fraction, "train split fraction (default 0.75)");
    cmd->add_option("--max-generations", f.max_generations, "dual teaching generation cap");
    cmd->add_option("--gate-sum", f.gate_sum, "teacher precision-sum gate (default 1.1)");
    cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig build_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) apply_json_config(cfg, f.config_path);
    if (!f.dataset.empty()) cfg.dataset_path = f.dataset;
    if (!f.synthetic.empty()) {
        std::vector<double> v = parse_double_list(f.synthetic);
        if (v.size() != 4) throw std::invalid_argument("--synthetic expects n,dim,separation,flip");
        cfg.synthetic = SyntheticSpec{static_cast<std::size_t>(v[0]),
                                      static_cast<std::size_t>(v[1]), v[2], v[3]};
        cfg.dataset_path.clear();
    }
    if (!f.method.empty()) {
        cfg.methods.clear();
        std::istringstream is(f.method);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            auto parsed = method_from_string(tok);
            if (!parsed) throw std::invalid_argument("unknown method '" + tok + "'");
            cfg.methods.push_back(*parsed);
        }
    }
    if (!f.base.empty()) {
        cfg.bases.clear();
        std::istringstream is(f.base);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            auto parsed = learner_from_string(tok);
            if (!parsed) throw std::invalid_argument("unknown base learner '" + tok + "'");
            cfg.bases.push_back(*parsed);
        }
    }
    if (!f.teacher_mode.empty()) {
        auto parsed = teacher_mode_from_string(f.teacher_mode);
        if (!parsed) throw std::invalid_argument("unknown teacher mode '" + f.teacher_mode + "'");
        cfg.teacher_mode = *parsed;
    }
    if (!f.ratio.empty()) cfg.ratios = {std::stod(f.ratio)};
    if (!f.ratios.empty()) cfg.ratios = parse_double_list(f.ratios);
    if (!f.seed.empty()) cfg.seeds = {std::stoull(f.seed)};
    if (!f.seeds.empty()) cfg.seeds = parse_seed_list(f.seeds);
    if (f.train_fraction >= 0.0) cfg.train_fraction = f.train_fraction;
    if (f.max_generations > 0) cfg.max_generations = f.max_generations;
    if (f.gate_sum >= 0.0) cfg.gate_sum = f.gate_sum;
    if (!f.out.empty()) cfg.out_dir = f.out;
    return cfg;
}

std::string num6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int cmd_dynamics(const std::string& mode, std::size_t resolution, const std::string& quality_str,
                 const std::string& e0_str, std::size_t steps, std::size_t trials, std::size_t n,
                 double positive_fraction, const std::string& fixed_str, std::uint64_t seed,
                 const std::string& out_path) {
    std::ostringstream os;
    if (mode == "surface_precision" || mode == "surface_recall") {
        std::vector<double> fixed =
            fixed_str.empty() ? std::vector<double>{0.5, 0.5} : parse_double_list(fixed_str);
        if (fixed.size() != 2) throw std::invalid_argument("--fixed expects two values a,b");
        bool precision_mode = mode == "surface_precision";
        auto rows = sweep_eigen_surface(resolution,
                                        precision_mode ? SweepMode::precision : SweepMode::recall,
                                        fixed[0], fixed[1]);
        os << (precision_mode ? "p_plus,p_minus,lambda_max\n" : "r_plus,r_minus,lambda_max\n");
        for (const SweepRow& r : rows)
            os << num6(r.x) << ',' << num6(r.y) << ',' << num6(r.max_magnitude) << "\n";
    } else if (mode == "trajectory" || mode == "oracle") {
        std::vector<double> q4 = parse_double_list(quality_str);
        if (q4.size() != 4)
            throw std::invalid_argument("--quality expects p_plus,r_plus,p_minus,r_minus");
        TeacherQuality q{q4[0], q4[1], q4[2], q4[3]};
        if (mode == "trajectory") {
            std::vector<double> e0v = parse_double_list(e0_str);
            if (e0v.size() != 2) throw std::invalid_argument("--e0 expects alpha,beta");
            auto traj = simulate_trajectory(q, ErrorState{e0v[0], e0v[1]}, steps);
            os << "step,alpha,beta\n";
            for (std::size_t k = 0; k < traj.size(); ++k)
                os << k << ',' << num6(traj[k].alpha) << ',' << num6(traj[k].beta) << "\n";
        } else {
            OracleRun run = simulate_oracle_run(q, n, positive_fraction, steps, trials, seed);
            os << "step,alpha_mean,beta_mean,alpha_se,beta_se,warnings\n";
            for (std::size_t k = 0; k < run.steps.size(); ++k)
                os << k << ',' << num6(run.steps[k].alpha_mean) << ','
                   << num6(run.steps[k].beta_mean) << ',' << num6(run.steps[k].alpha_se) << ','
                   << num6(run.steps[k].beta_se) << ',' << run.saturation_warnings << "\n";
        }
    } else {
        throw std::invalid_argument("unknown dynamics mode '" + mode + "'");
    }

    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot write '" + out_path + "'");
        out << os.str();
    }
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Dual Teaching semi-supervised learning toolkit"};
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags;
    CLI::App* run = app.add_subcommand("run", "run one experiment configuration");
    add_common_flags(run, run_flags);
    std::string save_model_path;
    run->add_option("--save-model", save_model_path, "write the final model as JSON (single cell)");

    CLI::App* sweep = app.add_subcommand("sweep", "ratio sweep with per-group mean rows");
    add_common_flags(sweep, sweep_flags);

    CLI::App* dynamics = app.add_subcommand("dynamics", "error-dynamics simulations");
    std::string dyn_mode, dyn_quality = "0.8,0.5,0.8,0.5", dyn_e0 = "100,100", dyn_fixed, dyn_out;
    std::size_t dyn_resolution = 101, dyn_steps = 50, dyn_trials = 50, dyn_n = 20000;
    double dyn_posfrac = 0.5;
    std::uint64_t dyn_seed = 0;
    dynamics->add_option("--mode", dyn_mode, "surface_precision|surface_recall|trajectory|oracle")
        ->required();
    dynamics->add_option("--resolution", dyn_resolution, "surface grid resolution");
    dynamics->add_option("--quality", dyn_quality, "teacher quality p_plus,r_plus,p_minus,r_minus");
    dynamics->add_option("--e0", dyn_e0, "initial error state alpha,beta");
    dynamics->add_option("--fixed", dyn_fixed,
                         "fixed pair for surfaces: recalls (precision mode) or precisions");
    dynamics->add_option("--steps", dyn_steps, "trajectory/oracle steps");
    dynamics->add_option("--trials", dyn_trials, "oracle Monte-Carlo trials");
    dynamics->add_option("--n", dyn_n, "oracle population size");
    dynamics->add_option("--positive-fraction", dyn_posfrac, "oracle true-positive fraction");
    dynamics->add_option("--seed", dyn_seed, "oracle seed");
    dynamics->add_option("--out", dyn_out, "output CSV path (stdout when omitted)");

    CLI::App* inspect = app.add_subcommand("inspect", "print dataset statistics");
    std::string inspect_dataset;
    inspect->add_option("--dataset", inspect_dataset, "LIBSVM-format dataset file")->required();

    std::vector<std::string> argv = args;
    try {
        app.parse(std::vector<std::string>(argv.rbegin(), argv.rend()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (run->parsed() || sweep->parsed()) {
            ExperimentConfig cfg = build_config(run->parsed() ? run_flags : sweep_flags);
            std::vector<CellResult> cells = run_experiment(cfg);
            write_experiment_outputs(cfg, cells, /*append_means=*/sweep->parsed());
            if (!save_model_path.empty() && cells.size() == 1)
                std::ofstream(save_model_path) << model_to_json(cells.front().final_model);
            std::cout << "wrote " << cells.size() << " summary rows to " << cfg.out_dir
                      << "/summary.csv\n";
            return kExitOk;
        }
        if (dynamics->parsed())
            return cmd_dynamics(dyn_mode, dyn_resolution, dyn_quality, dyn_e0, dyn_steps,
                                dyn_trials, dyn_n, dyn_posfrac, dyn_fixed, dyn_seed, dyn_out);
        if (inspect->parsed()) {
            ExperimentConfig cfg;
            cfg.dataset_path = inspect_dataset;
            Dataset d = load_dataset(cfg);
            std::size_t pos = 0;
            for (int y : d.labels) pos += y > 0;
            std::cout << "name: " << d.name << "\nexamples: " << d.size()
                      << "\nfeature_dim: " << d.feature_dim << "\npositive: " << pos
                      << "\nnegative: " << d.size() - pos << "\nclass_ratio: "
                      << num6(static_cast<double>(pos) / static_cast<double>(d.size() - pos))
                      << "\n";
            return kExitOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

}  // namespace dualteach
