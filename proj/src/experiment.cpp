#include "dualteach/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <tuple>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dualteach/baselines.hpp"
#include "dualteach/metrics.hpp"
#include "dualteach/rng.hpp"

namespace dualteach {

std::string to_string(Method m) {
    switch (m) {
        case Method::dual_teaching: return "dual_teaching";
        case Method::self_training: return "self_training";
        case Method::co_training: return "co_training";
        case Method::supervised: return "supervised";
    }
    return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
    if (s == "dual_teaching") return Method::dual_teaching;
    if (s == "self_training") return Method::self_training;
    if (s == "co_training") return Method::co_training;
    if (s == "supervised") return Method::supervised;
    return std::nullopt;
}

std::optional<LearnerKind> learner_from_string(const std::string& s) {
    if (s == "lr") return LearnerKind::logistic;
    if (s == "svm") return LearnerKind::linear_svm;
    if (s == "ada") return LearnerKind::adaboost_stumps;
    return std::nullopt;
}

std::optional<TeacherMode> teacher_mode_from_string(const std::string& s) {
    if (s == "equal_weight") return TeacherMode::equal_weight;
    if (s == "balanced") return TeacherMode::balanced;
    if (s == "balanced_tuned") return TeacherMode::balanced_tuned;
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    if (dataset_path.empty() == !synthetic.has_value())
        throw std::invalid_argument("exactly one of dataset path or synthetic spec is required");
    if (methods.empty() || bases.empty()) throw std::invalid_argument("need a method and a base");
    if (ratios.empty()) throw std::invalid_argument("need at least one labeled ratio");
    for (double r : ratios)
        if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("ratios must lie in (0,1]");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0,1)");
    if (seeds.empty()) throw std::invalid_argument("need at least one seed");
    if (max_generations < 1) throw std::invalid_argument("max_generations must be >= 1");
}

std::uint64_t ExperimentConfig::hash() const {
    std::ostringstream os;
    os << dataset_path << '|';
    if (synthetic)
        os << synthetic->n << ',' << synthetic->dim << ',' << synthetic->separation << ','
           << synthetic->flip;
    os << '|';
    for (Method m : methods) os << to_string(m) << ',';
    for (LearnerKind b : bases) os << to_string(b) << ',';
    os << '|' << to_string(teacher_mode) << '|' << train_fraction << '|' << max_generations << '|'
       << gate_sum << '|';
    for (double r : ratios) os << r << ',';
    os << '|';
    for (std::uint64_t s : seeds) os << s << ',';
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Dataset load_dataset(const ExperimentConfig& config) {
    if (config.synthetic) {
        const SyntheticSpec& s = *config.synthetic;
        std::uint64_t gen_seed = config.seeds.empty() ? 0 : config.seeds.front();
        Dataset d = generate_two_gaussians(std::max<std::size_t>(1, s.n / 2), s.dim, s.separation,
                                           s.flip, derive_seed(gen_seed, 0x9e4));
        if (!config.dataset_name.empty()) d.name = config.dataset_name;
        return d;
    }
    std::ifstream in(config.dataset_path);
    if (!in) throw DataError("cannot read dataset file '" + config.dataset_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string name = config.dataset_name.empty()
                           ? std::filesystem::path(config.dataset_path).stem().string()
                           : config.dataset_name;
    return parse_libsvm(buf.str(), name);
}

namespace {

double test_accuracy(const Model& m, const Dataset& test) {
    return accuracy(confusion(predict_all(m, test.examples), test.labels));
}

}  // namespace

CellResult run_cell(const Dataset& full, Method method, LearnerKind base, double ratio,
                    std::uint64_t seed, const ExperimentConfig& config) {
    auto [train_raw, test_raw] = split_train_test(full, config.train_fraction, seed);
    auto [train, rest] = normalize_features(train_raw, {test_raw});
    const Dataset& test = rest.front();
    PartialDataset pd = split_labeled_unlabeled(train, ratio, derive_seed(seed, 0x1ab));

    BaseLearnerSpec spec;
    spec.kind = base;

    CellResult cell;
    cell.summary.dataset = full.name;
    cell.summary.method = method;
    cell.summary.base = base;
    cell.summary.teacher_mode = config.teacher_mode;
    cell.summary.labeled_ratio = ratio;
    cell.summary.seed = seed;

    Model supervised =
        fit(spec, pd.labeled_examples, pd.labeled_labels, nullptr, derive_seed(seed, 0x5af));
    cell.summary.baseline_supervised_accuracy = test_accuracy(supervised, test);

    switch (method) {
        case Method::supervised: {
            cell.final_model = supervised;
            cell.summary.final_test_accuracy = cell.summary.baseline_supervised_accuracy;
            break;
        }
        case Method::dual_teaching: {
            DTOptions opts;
            opts.teacher_mode = config.teacher_mode;
            opts.max_generations = config.max_generations;
            opts.seed = derive_seed(seed, 0xd7);
            opts.gate_sum = config.gate_sum;
            opts.test_set = &test;
            DTState st = run_dual_teaching(pd, spec, opts);
            cell.final_model = st.model;
            cell.history = st.history;
            cell.summary.generations_run = st.generation;
            cell.summary.final_test_accuracy = test_accuracy(st.model, test);
            break;
        }
        case Method::self_training: {
            SelfTrainOptions opts;
            SelfTrainResult r = run_self_training(pd, spec, opts, derive_seed(seed, 0x57));
            cell.final_model = r.model;
            cell.summary.generations_run = r.history.empty() ? 0 : r.history.back().iteration;
            cell.summary.final_test_accuracy = test_accuracy(r.model, test);
            for (const BaselineIteration& it : r.history) {
                GenerationRecord g;
                g.generation = it.iteration;
                g.retraining_set_size = it.training_pool_size;
                cell.history.push_back(g);
            }
            break;
        }
        case Method::co_training: {
            CoTrainOptions opts;
            opts.feature_split_seed = derive_seed(seed, 0xfee);
            CoTrainResult r = run_co_training(pd, spec, opts, derive_seed(seed, 0xc0));
            cell.final_model = r.view_a;  // view A stored; vote used for accuracy
            cell.summary.generations_run = r.history.empty() ? 0 : r.history.back().iteration;
            cell.summary.final_test_accuracy =
                accuracy(confusion(r.predict_labels(test.examples), test.labels));
            for (const BaselineIteration& it : r.history) {
                GenerationRecord g;
                g.generation = it.iteration;
                g.retraining_set_size = it.training_pool_size;
                cell.history.push_back(g);
            }
            break;
        }
    }
    cell.summary.delta =
        cell.summary.final_test_accuracy - cell.summary.baseline_supervised_accuracy;
    return cell;
}

namespace {

std::size_t thread_budget() {
    const char* env = std::getenv("DUALTEACH_THREADS");
    if (!env) return 1;
    long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<std::size_t>(v) : 1;
}

struct CellKey {
    Method method;
    LearnerKind base;
    double ratio;
    std::uint64_t seed;
};

}  // namespace

std::vector<CellResult> run_experiment(const ExperimentConfig& config) {
    config.validate();
    Dataset full = load_dataset(config);

    std::vector<CellKey> keys;
    for (Method m : config.methods)
        for (LearnerKind b : config.bases)
            for (double r : config.ratios)
                for (std::uint64_t s : config.seeds) keys.push_back({m, b, r, s});

    std::vector<CellResult> cells(keys.size());
    const std::size_t threads = std::min(thread_budget(), keys.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < keys.size(); ++i)
            cells[i] = run_cell(full, keys[i].method, keys[i].base, keys[i].ratio, keys[i].seed,
                                config);
    } else {
        std::vector<std::future<void>> workers;
        std::atomic<std::size_t> next{0};
        for (std::size_t t = 0; t < threads; ++t)
            workers.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next.fetch_add(1); i < keys.size(); i = next.fetch_add(1))
                    cells[i] = run_cell(full, keys[i].method, keys[i].base, keys[i].ratio,
                                        keys[i].seed, config);
            }));
        for (auto& w : workers) w.get();
    }

    std::stable_sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
        const SummaryRow &x = a.summary, &y = b.summary;
        auto key = [](const SummaryRow& r) {
            return std::tuple(r.dataset, to_string(r.method), to_string(r.base), r.labeled_ratio,
                              r.seed);
        };
        return key(x) < key(y);
    });
    return cells;
}

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows, std::uint64_t config_hash,
                        bool append_means) {
    std::ostringstream os;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(config_hash));
    os << "# config_hash=" << hash_buf << "\n";
    os << "dataset,method,base,teacher_mode,labeled_ratio,seed,generations_run,"
          "final_test_accuracy,baseline_supervised_accuracy,delta\n";
    auto emit = [&](const SummaryRow& r, const std::string& seed_field) {
        os << r.dataset << ',' << to_string(r.method) << ',' << to_string(r.base) << ','
           << to_string(r.teacher_mode) << ',' << num(r.labeled_ratio) << ',' << seed_field << ','
           << r.generations_run << ',' << num(r.final_test_accuracy) << ','
           << num(r.baseline_supervised_accuracy) << ',' << num(r.delta) << "\n";
    };
    for (const SummaryRow& r : rows) emit(r, std::to_string(r.seed));

    if (append_means) {
        std::map<std::tuple<std::string, std::string, std::string, std::string, double>,
                 std::pair<SummaryRow, std::size_t>>
            groups;
        for (const SummaryRow& r : rows) {
            auto key = std::tuple(r.dataset, to_string(r.method), to_string(r.base),
                                  to_string(r.teacher_mode), r.labeled_ratio);
            auto [it, inserted] = groups.emplace(key, std::pair(r, std::size_t{0}));
            if (!inserted) {
                it->second.first.generations_run += r.generations_run;
                it->second.first.final_test_accuracy += r.final_test_accuracy;
                it->second.first.baseline_supervised_accuracy += r.baseline_supervised_accuracy;
                it->second.first.delta += r.delta;
            }
            ++it->second.second;
        }
        for (auto& [key, agg] : groups) {
            SummaryRow mean = agg.first;
            double n = static_cast<double>(agg.second);
            mean.generations_run = static_cast<std::size_t>(mean.generations_run / agg.second);
            mean.final_test_accuracy /= n;
            mean.baseline_supervised_accuracy /= n;
            mean.delta /= n;
            emit(mean, "mean");
        }
    }
    return os.str();
}

std::string history_csv(const std::vector<GenerationRecord>& rows, std::uint64_t config_hash,
                        std::uint64_t seed) {
    std::ostringstream os;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(config_hash));
    os << "# config_hash=" << hash_buf << " seed=" << seed << "\n";
    os << "generation,p1,r1,p2,r2,T,assumptions_met,retraining_set_size,precision_labeled,"
          "recall_labeled,precision_unlabeled,recall_unlabeled,accuracy_test\n";
    for (const GenerationRecord& g : rows) {
        os << g.generation << ',' << opt_num(g.teacher_stats.fp.precision) << ','
           << opt_num(g.teacher_stats.fp.recall) << ',' << opt_num(g.teacher_stats.fn.precision)
           << ',' << opt_num(g.teacher_stats.fn.recall) << ',' << num(g.threshold) << ','
           << (g.teacher_stats.assumptions_met ? 1 : 0) << ',' << g.retraining_set_size << ','
           << opt_num(g.precision_labeled) << ',' << opt_num(g.recall_labeled) << ','
           << opt_num(g.precision_unlabeled) << ',' << opt_num(g.recall_unlabeled) << ','
           << opt_num(g.accuracy_test) << "\n";
    }
    return os.str();
}

void write_experiment_outputs(const ExperimentConfig& config,
                              const std::vector<CellResult>& cells, bool append_means) {
    std::filesystem::create_directories(config.out_dir);
    std::uint64_t h = config.hash();

    std::vector<SummaryRow> rows;
    rows.reserve(cells.size());
    for (const CellResult& c : cells) rows.push_back(c.summary);
    std::ofstream(std::filesystem::path(config.out_dir) / "summary.csv")
        << summary_csv(rows, h, append_means);

    for (const CellResult& c : cells) {
        if (c.history.empty()) continue;
        std::ostringstream name;
        name << "history_" << c.summary.dataset << '_' << to_string(c.summary.method) << '_'
             << to_string(c.summary.base) << '_' << num(c.summary.labeled_ratio) << '_'
             << c.summary.seed << ".csv";
        std::ofstream(std::filesystem::path(config.out_dir) / name.str())
            << history_csv(c.history, h, c.summary.seed);
    }
}

}  // namespace dualteach
