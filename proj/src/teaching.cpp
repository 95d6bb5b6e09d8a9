#include "dualteach/teaching.hpp"

#include <algorithm>
#include <stdexcept>

#include "dualteach/metrics.hpp"
#include "dualteach/rng.hpp"

namespace dualteach {

std::string to_string(TeacherMode m) {
    switch (m) {
        case TeacherMode::equal_weight: return "equal_weight";
        case TeacherMode::balanced: return "balanced";
        case TeacherMode::balanced_tuned: return "balanced_tuned";
    }
    return "?";
}

bool gate_satisfied(const TeacherStats& s, double gate_sum) {
    return s.fp.effective_precision() + s.fn.effective_precision() > gate_sum &&
           s.fp.effective_recall() * s.fn.effective_recall() > 0.0;
}

DTState zero_initialize(const BaseLearnerSpec& spec, std::size_t feature_dim) {
    DTState st;
    st.model = zero_model(spec, feature_dim);
    return st;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_teacher_data(
    const TrainView& view, std::uint64_t seed) {
    const std::vector<int>& labels = view.labels;
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
    if (labels.size() < 4 || pos.empty() || neg.empty())
        throw DataError(
            "too few labeled examples to split into teacher-training and validation halves; "
            "increase the labeled ratio");
    Rng rng(derive_seed(seed, 0x7ea));
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    std::vector<std::size_t> tx, vx;
    auto halve = [&](const std::vector<std::size_t>& idx) {
        std::size_t take = (idx.size() + 1) / 2;
        for (std::size_t i = 0; i < idx.size(); ++i) (i < take ? tx : vx).push_back(idx[i]);
    };
    halve(pos);
    halve(neg);
    std::sort(tx.begin(), tx.end());
    std::sort(vx.begin(), vx.end());
    return {std::move(tx), std::move(vx)};
}

namespace {

BaseLearnerSpec teacher_spec(TeacherMode mode) {
    BaseLearnerSpec s;
    s.kind = LearnerKind::logistic;
    s.weighting = mode == TeacherMode::equal_weight ? ClassWeighting::equal
                                                    : ClassWeighting::balanced;
    return s;
}

Model constant_teacher(const BaseLearnerSpec& spec, std::size_t feature_dim, int label) {
    Model m = zero_model(spec, feature_dim);
    m.constant_label = label;
    return m;
}

// Trains one error-flagging teacher from a channel: examples the base model
// assigns to `channel_sign`, target +1 ("is an error") iff the true label
// disagrees.
Model train_one_teacher(const TrainView& view, const std::vector<std::size_t>& tx_indices,
                        const std::vector<int>& base_preds, int channel_sign,
                        const BaseLearnerSpec& spec, std::uint64_t seed) {
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (std::size_t k = 0; k < tx_indices.size(); ++k) {
        if (base_preds[k] != channel_sign) continue;
        std::size_t i = tx_indices[k];
        xs.push_back(view.labeled_examples[i]);
        ys.push_back(view.labels[i] == channel_sign ? -1 : +1);
    }
    if (xs.empty()) return constant_teacher(spec, view.feature_dim, -1);
    return fit(spec, xs, ys, nullptr, seed);  // single-class channels degenerate inside fit
}

ChannelStats evaluate_channel(const Model& teacher, const TrainView& view,
                              const std::vector<std::size_t>& vx_indices,
                              const std::vector<int>& base_preds, int channel_sign,
                              double threshold) {
    ChannelStats out;
    std::size_t tp = 0, fp = 0, fn = 0;
    bool any = false;
    for (std::size_t k = 0; k < vx_indices.size(); ++k) {
        if (base_preds[k] != channel_sign) continue;
        any = true;
        std::size_t i = vx_indices[k];
        bool is_error = view.labels[i] != channel_sign;
        bool flagged = predict_proba(teacher, view.labeled_examples[i]) > threshold;
        if (flagged && is_error)
            ++tp;
        else if (flagged)
            ++fp;
        else if (is_error)
            ++fn;
    }
    if (!any || (tp + fp == 0 && tp + fn == 0)) {
        out.vacuous = true;
        return out;
    }
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return out;
}

}  // namespace

std::pair<Model, Model> train_teachers(const TrainView& view,
                                       const std::vector<std::size_t>& tx_indices,
                                       const Model& base_model, TeacherMode mode,
                                       std::uint64_t seed) {
    if (tx_indices.empty()) throw std::invalid_argument("train_teachers: empty TX_l");
    BaseLearnerSpec spec = teacher_spec(mode);
    std::vector<int> base_preds(tx_indices.size());
    for (std::size_t k = 0; k < tx_indices.size(); ++k)
        base_preds[k] = predict(base_model, view.labeled_examples[tx_indices[k]]);
    Model fp = train_one_teacher(view, tx_indices, base_preds, +1, spec, derive_seed(seed, 1));
    Model fn = train_one_teacher(view, tx_indices, base_preds, -1, spec, derive_seed(seed, 2));
    return {std::move(fp), std::move(fn)};
}

TeacherStats evaluate_teachers(const Model& fp_teacher, const Model& fn_teacher,
                               const TrainView& view, const std::vector<std::size_t>& vx_indices,
                               const Model& base_model, double threshold, double gate_sum) {
    std::vector<int> base_preds(vx_indices.size());
    for (std::size_t k = 0; k < vx_indices.size(); ++k)
        base_preds[k] = predict(base_model, view.labeled_examples[vx_indices[k]]);
    TeacherStats s;
    s.fp = evaluate_channel(fp_teacher, view, vx_indices, base_preds, +1, threshold);
    s.fn = evaluate_channel(fn_teacher, view, vx_indices, base_preds, -1, threshold);
    s.assumptions_met = gate_satisfied(s, gate_sum);
    return s;
}

TeacherPair tune_teachers(Model fp_teacher, Model fn_teacher, const TrainView& view,
                          const std::vector<std::size_t>& vx_indices, const Model& base_model,
                          TeacherMode mode, double gate_sum) {
    if (vx_indices.empty()) throw std::invalid_argument("tune_teachers: empty VX_l");
    TeacherPair pair;
    pair.fp_teacher = std::move(fp_teacher);
    pair.fn_teacher = std::move(fn_teacher);

    if (mode != TeacherMode::balanced_tuned) {
        // Fixed discrimination threshold; the gate is still checked.
        pair.threshold = 0.5;
        pair.stats = evaluate_teachers(pair.fp_teacher, pair.fn_teacher, view, vx_indices,
                                       base_model, pair.threshold, gate_sum);
        pair.tuning_evaluations = 1;
        return pair;
    }

    for (int i = 0; i < 19; ++i) {
        double t = (10 + 5 * i) / 100.0;  // 0.10, 0.15, ..., 1.00
        TeacherStats s = evaluate_teachers(pair.fp_teacher, pair.fn_teacher, view, vx_indices,
                                           base_model, t, gate_sum);
        ++pair.tuning_evaluations;
        pair.threshold = t;
        pair.stats = s;
        if (s.assumptions_met) return pair;
    }
    pair.threshold = 1.05;  // search exhausted
    pair.stats.assumptions_met = false;
    return pair;
}

FlagSets estimate_errors(const TeacherPair& pair,
                         const std::vector<std::vector<double>>& unlabeled,
                         const std::vector<int>& base_predictions) {
    if (!pair.stats.assumptions_met)
        throw std::logic_error("estimate_errors: assumptions not met; skip this generation");
    if (base_predictions.size() != unlabeled.size())
        throw std::invalid_argument("estimate_errors: prediction/example count mismatch");
    FlagSets flags;
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        if (base_predictions[i] > 0) {
            if (predict_proba(pair.fp_teacher, unlabeled[i]) > pair.threshold)
                flags.first.insert(i);
        } else {
            if (predict_proba(pair.fn_teacher, unlabeled[i]) > pair.threshold)
                flags.second.insert(i);
        }
    }
    return flags;
}

RetrainingSet update_retraining_set(RetrainingSet r, const std::set<std::size_t>& fp_flagged,
                                    const std::set<std::size_t>& fn_flagged,
                                    std::size_t generation) {
    for (std::size_t id : fp_flagged) r.add(id, -1, generation);
    for (std::size_t id : fn_flagged) r.add(id, +1, generation);
    return r;
}

Model retrain(const BaseLearnerSpec& spec, const RetrainingSet& r,
              const std::vector<std::vector<double>>& unlabeled, std::uint64_t seed) {
    if (r.entries.empty()) throw std::invalid_argument("retrain: empty retraining set");
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    xs.reserve(r.size());
    for (const auto& [id, label] : r.entries) {
        xs.push_back(unlabeled.at(id));
        ys.push_back(label);
    }
    return fit(spec, xs, ys, nullptr, seed);
}

namespace {

struct EvalSets {
    std::optional<double> precision_labeled, recall_labeled;
    std::optional<double> precision_unlabeled, recall_unlabeled;
    std::optional<double> accuracy_test;
};

EvalSets evaluate_model(const Model& m, const PartialDataset& pd, const Dataset* test) {
    EvalSets e;
    ConfusionMatrix cl = confusion(predict_all(m, pd.labeled_examples), pd.labeled_labels);
    e.precision_labeled = precision(cl);
    e.recall_labeled = recall(cl);
    if (!pd.unlabeled_examples.empty()) {
        ConfusionMatrix cu = confusion(predict_all(m, pd.unlabeled_examples), pd.hidden_truth);
        e.precision_unlabeled = precision(cu);
        e.recall_unlabeled = recall(cu);
    }
    if (test) e.accuracy_test = accuracy(confusion(predict_all(m, test->examples), test->labels));
    return e;
}

}  // namespace

DTState run_dual_teaching(const PartialDataset& pd, const BaseLearnerSpec& spec,
                          const DTOptions& options) {
    pd.validate();
    if (options.max_generations < 1)
        throw std::invalid_argument("max_generations must be >= 1");
    const TrainView view = pd.train_view();

    DTState state = zero_initialize(spec, pd.feature_dim);
    std::vector<std::size_t> tx, vx;
    if (!options.teacher_override) {
        auto split = split_teacher_data(view, derive_seed(options.seed, 0x511));
        tx = std::move(split.first);
        vx = std::move(split.second);
    }

    for (std::size_t k = 1; k <= options.max_generations; ++k) {
        std::vector<int> preds_u = predict_all(state.model, view.unlabeled_examples);

        bool met = false;
        bool changed = false;
        GenerationRecord rec;
        rec.generation = k;

        std::optional<FlagSets> flags;
        if (options.teacher_override) {
            flags = options.teacher_override(preds_u);
            met = flags.has_value();
            rec.teacher_stats.assumptions_met = met;
        } else {
            auto [fp_t, fn_t] =
                train_teachers(view, tx, state.model, options.teacher_mode,
                               derive_seed(options.seed, 0x7eac4, k));
            TeacherPair pair = tune_teachers(std::move(fp_t), std::move(fn_t), view, vx,
                                             state.model, options.teacher_mode, options.gate_sum);
            rec.teacher_stats = pair.stats;
            rec.threshold = pair.threshold;
            met = pair.stats.assumptions_met;
            if (met) flags = estimate_errors(pair, view.unlabeled_examples, preds_u);
        }

        if (met) {
            RetrainingSet updated =
                update_retraining_set(state.retraining_set, flags->first, flags->second, k);
            changed = !(updated == state.retraining_set);
            state.retraining_set = std::move(updated);
            if (!state.retraining_set.entries.empty() && changed) {
                std::uint64_t rseed = derive_seed(options.seed, 0x2e7, k);
                if (options.include_labeled_in_retrain) {
                    std::vector<std::vector<double>> xs;
                    std::vector<int> ys;
                    for (const auto& [id, label] : state.retraining_set.entries) {
                        xs.push_back(view.unlabeled_examples.at(id));
                        ys.push_back(label);
                    }
                    for (std::size_t i : tx) {
                        xs.push_back(view.labeled_examples[i]);
                        ys.push_back(view.labels[i]);
                    }
                    state.model = fit(spec, xs, ys, nullptr, rseed);
                } else {
                    state.model = retrain(spec, state.retraining_set, view.unlabeled_examples, rseed);
                }
            }
        }
        // Failed-gate generations leave both the model and R frozen.

        rec.retraining_set_size = state.retraining_set.size();
        EvalSets e = evaluate_model(state.model, pd, options.test_set);
        rec.precision_labeled = e.precision_labeled;
        rec.recall_labeled = e.recall_labeled;
        rec.precision_unlabeled = e.precision_unlabeled;
        rec.recall_unlabeled = e.recall_unlabeled;
        rec.accuracy_test = e.accuracy_test;
        state.history.push_back(rec);
        state.generation = k;

        if (met && !changed) break;  // R stable for a full generation
    }
    return state;
}

}  // namespace dualteach
