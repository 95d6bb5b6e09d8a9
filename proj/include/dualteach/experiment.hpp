#ifndef DUALTEACH_EXPERIMENT_HPP
#define DUALTEACH_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualteach/dataset.hpp"
#include "dualteach/learners.hpp"
#include "dualteach/teaching.hpp"

namespace dualteach {

enum class Method { dual_teaching, self_training, co_training, supervised };

std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);
std::optional<LearnerKind> learner_from_string(const std::string& s);
std::optional<TeacherMode> teacher_mode_from_string(const std::string& s);

struct SyntheticSpec {
    std::size_t n = 0;
    std::size_t dim = 0;
    double separation = 0.0;
    double flip = 0.0;
};

struct ExperimentConfig {
    std::string dataset_path;
    std::optional<SyntheticSpec> synthetic;
    std::string dataset_name;  // derived from path / "synthetic" when empty
    std::vector<Method> methods{Method::dual_teaching};
    std::vector<LearnerKind> bases{LearnerKind::logistic};
    TeacherMode teacher_mode = TeacherMode::balanced_tuned;
    std::vector<double> ratios{0.2};
    double train_fraction = 0.75;
    std::vector<std::uint64_t> seeds{0};
    std::size_t max_generations = 30;
    double gate_sum = 1.1;
    std::string out_dir = "results";

    void validate() const;  // throws std::invalid_argument
    std::uint64_t hash() const;
};

struct SummaryRow {
    std::string dataset;
    Method method = Method::dual_teaching;
    LearnerKind base = LearnerKind::logistic;
    TeacherMode teacher_mode = TeacherMode::balanced_tuned;
    double labeled_ratio = 0.0;
    std::uint64_t seed = 0;
    std::size_t generations_run = 0;
    double final_test_accuracy = 0.0;
    double baseline_supervised_accuracy = 0.0;
    double delta = 0.0;
};

struct CellResult {
    SummaryRow summary;
    std::vector<GenerationRecord> history;
    Model final_model;
};

/// Loads the configured dataset (file path or synthetic spec).
Dataset load_dataset(const ExperimentConfig& config);

/// One (method, base, ratio, seed) cell: 75/25 split, normalization fit on
/// train, labeled/unlabeled split, method run, supervised baseline.
CellResult run_cell(const Dataset& full, Method method, LearnerKind base, double ratio,
                    std::uint64_t seed, const ExperimentConfig& config);

/// Every cell in the config's cross product. Cells run in parallel up to
/// DUALTEACH_THREADS (default 1); results come back in a deterministic sorted
/// order regardless of scheduling.
std::vector<CellResult> run_experiment(const ExperimentConfig& config);

// CSV serialization. Every file starts with a "# config_hash=..." comment
// followed by the header row; numbers carry 6 significant digits.
std::string summary_csv(const std::vector<SummaryRow>& rows, std::uint64_t config_hash,
                        bool append_means);
std::string history_csv(const std::vector<GenerationRecord>& rows, std::uint64_t config_hash,
                        std::uint64_t seed);

/// Writes summary.csv plus one history CSV per cell under config.out_dir.
void write_experiment_outputs(const ExperimentConfig& config,
                              const std::vector<CellResult>& cells, bool append_means);

}  // namespace dualteach

#endif
