#ifndef DUALTEACH_TEACHING_HPP
#define DUALTEACH_TEACHING_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "dualteach/dataset.hpp"
#include "dualteach/learners.hpp"

namespace dualteach {

enum class TeacherMode { equal_weight, balanced, balanced_tuned };

std::string to_string(TeacherMode m);

/// Measured quality of one teacher on its validation channel. A channel is
/// vacuous when it holds no examples, or when an inactive teacher faces an
/// error-free channel; vacuous and undefined values both count as 1 toward
/// the tuning gate (an inactive channel cannot pollute the retraining set).
struct ChannelStats {
    std::optional<double> precision;
    std::optional<double> recall;
    bool vacuous = false;

    double effective_precision() const { return vacuous ? 1.0 : precision.value_or(1.0); }
    double effective_recall() const { return vacuous ? 1.0 : recall.value_or(1.0); }
};

struct TeacherStats {
    ChannelStats fp;  // p1, r1: FP teacher on the base-positive channel
    ChannelStats fn;  // p2, r2: FN teacher on the base-negative channel
    bool assumptions_met = false;
};

bool gate_satisfied(const TeacherStats& s, double gate_sum);

struct TeacherPair {
    Model fp_teacher;  // flags errors among base-positive outputs
    Model fn_teacher;  // flags errors among base-negative outputs
    double threshold = 0.5;
    TeacherStats stats;
    int tuning_evaluations = 0;
};

/// Map unlabeled-example id -> teacher-corrected label. Re-inserting an id
/// overwrites its label; the set never shrinks.
struct RetrainingSet {
    std::map<std::size_t, int> entries;
    std::map<std::size_t, std::size_t> generation_added;

    void add(std::size_t id, int label, std::size_t generation) {
        entries[id] = label;
        generation_added.emplace(id, generation);
    }
    std::size_t size() const { return entries.size(); }

    bool operator==(const RetrainingSet& other) const { return entries == other.entries; }
};

struct GenerationRecord {
    std::size_t generation = 0;
    TeacherStats teacher_stats;
    double threshold = 0.0;
    std::size_t retraining_set_size = 0;
    std::optional<double> precision_labeled, recall_labeled;
    std::optional<double> precision_unlabeled, recall_unlabeled;
    std::optional<double> accuracy_test;
};

struct DTState {
    Model model;
    RetrainingSet retraining_set;
    std::size_t generation = 0;
    std::vector<GenerationRecord> history;
};

using FlagSets = std::pair<std::set<std::size_t>, std::set<std::size_t>>;

/// Test-fixture hook replacing the whole teacher path for one generation:
/// nullopt forces a failed gate, a value supplies (fp_flagged, fn_flagged)
/// directly.
using TeacherOverride =
    std::function<std::optional<FlagSets>(const std::vector<int>& base_predictions)>;

struct DTOptions {
    TeacherMode teacher_mode = TeacherMode::balanced_tuned;
    std::size_t max_generations = 30;
    std::uint64_t seed = 0;
    double gate_sum = 1.1;
    // Ablation: also feed the teacher-training half of the labeled pool (with
    // true labels) into every retrain. Off by default.
    bool include_labeled_in_retrain = false;
    const Dataset* test_set = nullptr;
    TeacherOverride teacher_override;
};

DTState zero_initialize(const BaseLearnerSpec& spec, std::size_t feature_dim);

/// Stratified 50/50 split of the labeled pool into teacher-training and
/// validation index sets; fixed once per run.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_teacher_data(
    const TrainView& view, std::uint64_t seed);

/// Trains the FP teacher on the TX_l examples the base model labels +1
/// (target: "is an error", i.e. true label -1) and the FN teacher
/// symmetrically on the base-negative half. Empty or single-class channels
/// yield constant teachers.
std::pair<Model, Model> train_teachers(const TrainView& view,
                                       const std::vector<std::size_t>& tx_indices,
                                       const Model& base_model, TeacherMode mode,
                                       std::uint64_t seed);

/// Evaluates both teachers on the validation split at a fixed threshold.
TeacherStats evaluate_teachers(const Model& fp_teacher, const Model& fn_teacher,
                               const TrainView& view, const std::vector<std::size_t>& vx_indices,
                               const Model& base_model, double threshold, double gate_sum);

/// Threshold search: T = 0.10, 0.15, ... until the gate passes or T exceeds 1
/// (at most 19 evaluations; failure exits with T = 1.05 and
/// assumptions_met = false). Non-tuned modes evaluate once at T = 0.5.
TeacherPair tune_teachers(Model fp_teacher, Model fn_teacher, const TrainView& view,
                          const std::vector<std::size_t>& vx_indices, const Model& base_model,
                          TeacherMode mode, double gate_sum);

/// Flags suspected errors among the unlabeled pool: ids the base model labels
/// +1 whose FP-teacher probability exceeds T, and symmetrically for FN. The
/// two sets are disjoint by construction. Requires assumptions_met.
FlagSets estimate_errors(const TeacherPair& pair,
                         const std::vector<std::vector<double>>& unlabeled,
                         const std::vector<int>& base_predictions);

RetrainingSet update_retraining_set(RetrainingSet r, const std::set<std::size_t>& fp_flagged,
                                    const std::set<std::size_t>& fn_flagged,
                                    std::size_t generation);

/// Fresh fit (no warm start) on the retraining set's examples and corrected
/// labels. R must be nonempty; when R is empty the caller keeps the previous
/// model instead.
Model retrain(const BaseLearnerSpec& spec, const RetrainingSet& r,
              const std::vector<std::vector<double>>& unlabeled, std::uint64_t seed);

/// The full generation loop. Stops at stability (a gate-passing generation
/// leaves R unchanged) or after max_generations.
DTState run_dual_teaching(const PartialDataset& pd, const BaseLearnerSpec& spec,
                          const DTOptions& options);

}  // namespace dualteach

#endif
