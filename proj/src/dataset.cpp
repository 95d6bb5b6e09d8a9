#include "dualteach/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "dualteach/rng.hpp"

namespace dualteach {

void Dataset::validate() const {
    if (examples.empty()) throw std::invalid_argument("dataset is empty");
    if (examples.size() != labels.size())
        throw std::invalid_argument("examples/labels length mismatch");
    if (feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1)
            throw std::invalid_argument("label not in {+1,-1}");
        if (examples[i].size() != feature_dim)
            throw std::invalid_argument("example dimension mismatch");
        for (double v : examples[i])
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    }
}

void PartialDataset::validate() const {
    if (labeled_count() < 2) throw std::invalid_argument("need at least 2 labeled examples");
    bool pos = false, neg = false;
    for (int y : labeled_labels) (y > 0 ? pos : neg) = true;
    if (!pos || !neg) throw std::invalid_argument("labeled pool must contain both classes");
    if (hidden_truth.size() != unlabeled_examples.size())
        throw std::invalid_argument("hidden_truth length mismatch");
}

ParseError::ParseError(std::size_t line, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == s.size() && std::isfinite(out);
}

bool parse_index(const std::string& s, long& out) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stol(s, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == s.size();
}

}  // namespace

Dataset parse_libsvm(const std::string& text, const std::string& name) {
    Dataset out;
    out.name = name;
    std::vector<double> raw_labels;
    std::vector<std::vector<std::pair<long, double>>> sparse_rows;
    long max_index = 0;

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line

        double label;
        if (!parse_double(tok, label)) throw ParseError(lineno, "bad label token '" + tok + "'");
        raw_labels.push_back(label);

        std::vector<std::pair<long, double>> row;
        long prev = 0;
        while (ls >> tok) {
            auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw ParseError(lineno, "expected idx:val, got '" + tok + "'");
            long idx;
            double val;
            if (!parse_index(tok.substr(0, colon), idx))
                throw ParseError(lineno, "bad feature index in '" + tok + "'");
            if (!parse_double(tok.substr(colon + 1), val))
                throw ParseError(lineno, "bad feature value in '" + tok + "'");
            if (idx <= 0) throw ParseError(lineno, "feature index must be positive");
            if (idx == prev) throw ParseError(lineno, "duplicate feature index " + std::to_string(idx));
            if (idx < prev) throw ParseError(lineno, "feature indices not increasing");
            prev = idx;
            max_index = std::max(max_index, idx);
            row.emplace_back(idx, val);
        }
        sparse_rows.push_back(std::move(row));
    }

    if (raw_labels.empty()) throw ParseError(0, "empty input");

    // Label mapping: identity for {+1,-1}; otherwise exactly two distinct
    // values, smaller -> -1.
    std::set<double> distinct(raw_labels.begin(), raw_labels.end());
    bool canonical = true;
    for (double v : distinct)
        if (v != 1.0 && v != -1.0) canonical = false;
    double neg_value = -1.0;
    if (!canonical) {
        if (distinct.size() != 2)
            throw ParseError(0, "cannot map labels: expected two distinct values");
        neg_value = *distinct.begin();
    }

    out.feature_dim = static_cast<std::size_t>(std::max<long>(max_index, 1));
    out.examples.reserve(sparse_rows.size());
    out.labels.reserve(sparse_rows.size());
    for (std::size_t i = 0; i < sparse_rows.size(); ++i) {
        std::vector<double> dense(out.feature_dim, 0.0);
        for (auto& [idx, val] : sparse_rows[i]) dense[static_cast<std::size_t>(idx) - 1] = val;
        out.examples.push_back(std::move(dense));
        int y;
        if (canonical)
            y = raw_labels[i] > 0 ? 1 : -1;
        else
            y = raw_labels[i] == neg_value ? -1 : 1;
        out.labels.push_back(y);
    }
    return out;
}

std::string serialize_libsvm(const Dataset& d) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < d.size(); ++i) {
        out += d.labels[i] > 0 ? "+1" : "-1";
        bool wrote_last = false;
        for (std::size_t j = 0; j < d.feature_dim; ++j) {
            if (d.examples[i][j] == 0.0) continue;
            std::snprintf(buf, sizeof buf, " %zu:%.17g", j + 1, d.examples[i][j]);
            out += buf;
            if (j + 1 == d.feature_dim) wrote_last = true;
        }
        // Pin feature_dim on the first record so the round trip preserves it.
        if (i == 0 && !wrote_last) {
            std::snprintf(buf, sizeof buf, " %zu:0", d.feature_dim);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::pair<Dataset, std::vector<Dataset>> normalize_features(const Dataset& train,
                                                            const std::vector<Dataset>& others) {
    for (const Dataset& o : others)
        if (o.feature_dim != train.feature_dim)
            throw std::invalid_argument("feature_dim mismatch in normalize_features");

    std::vector<double> lo(train.feature_dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(train.feature_dim, -std::numeric_limits<double>::infinity());
    for (const auto& x : train.examples)
        for (std::size_t j = 0; j < train.feature_dim; ++j) {
            lo[j] = std::min(lo[j], x[j]);
            hi[j] = std::max(hi[j], x[j]);
        }

    auto apply = [&](const Dataset& d) {
        Dataset out = d;
        for (auto& x : out.examples)
            for (std::size_t j = 0; j < d.feature_dim; ++j)
                x[j] = (hi[j] > lo[j]) ? (x[j] - lo[j]) / (hi[j] - lo[j]) : 0.0;
        return out;
    };

    std::vector<Dataset> transformed;
    transformed.reserve(others.size());
    for (const Dataset& o : others) transformed.push_back(apply(o));
    return {apply(train), std::move(transformed)};
}

namespace {

// Indices of each class, shuffled deterministically by seed.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> shuffled_class_indices(
    const std::vector<int>& labels, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
    Rng rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    return {std::move(pos), std::move(neg)};
}

// Splits target_total between two classes proportionally to their sizes,
// largest remainder first (positive class wins ties).
std::pair<std::size_t, std::size_t> allocate(std::size_t n_pos, std::size_t n_neg,
                                             std::size_t target_total) {
    const double n = static_cast<double>(n_pos + n_neg);
    double exact_pos = target_total * (n_pos / n);
    double exact_neg = target_total * (n_neg / n);
    std::size_t take_pos = static_cast<std::size_t>(std::floor(exact_pos));
    std::size_t take_neg = static_cast<std::size_t>(std::floor(exact_neg));
    while (take_pos + take_neg < target_total) {
        double rem_pos = (take_pos < n_pos) ? exact_pos - take_pos : -1.0;
        double rem_neg = (take_neg < n_neg) ? exact_neg - take_neg : -1.0;
        if (rem_pos >= rem_neg)
            ++take_pos;
        else
            ++take_neg;
    }
    return {take_pos, take_neg};
}

}  // namespace

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed) {
    d.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must be in (0,1)");
    auto [pos, neg] = shuffled_class_indices(d.labels, seed);
    if (pos.size() < 2 || neg.size() < 2)
        throw DataError("each class needs at least 2 examples to split");

    std::size_t target =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(d.size())));
    auto [take_pos, take_neg] = allocate(pos.size(), neg.size(), target);
    // Keep at least one example of each class on each side.
    auto clamp = [](std::size_t take, std::size_t n) { return std::min(std::max<std::size_t>(take, 1), n - 1); };
    take_pos = clamp(take_pos, pos.size());
    take_neg = clamp(take_neg, neg.size());

    Dataset train, test;
    train.feature_dim = test.feature_dim = d.feature_dim;
    train.name = d.name;
    test.name = d.name;
    auto emit = [&](const std::vector<std::size_t>& idx, std::size_t take) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            Dataset& dst = i < take ? train : test;
            dst.examples.push_back(d.examples[idx[i]]);
            dst.labels.push_back(d.labels[idx[i]]);
        }
    };
    emit(pos, take_pos);
    emit(neg, take_neg);
    return {std::move(train), std::move(test)};
}

PartialDataset split_labeled_unlabeled(const Dataset& train, double labeled_ratio,
                                       std::uint64_t seed) {
    train.validate();
    if (!(labeled_ratio > 0.0 && labeled_ratio <= 1.0))
        throw std::invalid_argument("labeled_ratio must be in (0,1]");
    auto [pos, neg] = shuffled_class_indices(train.labels, seed);

    std::size_t l = static_cast<std::size_t>(
        std::ceil(labeled_ratio * static_cast<double>(train.size()) - 1e-9));
    l = std::max<std::size_t>(l, 1);
    auto [take_pos, take_neg] = allocate(pos.size(), neg.size(), l);
    // Stratification must leave both classes in the labeled pool when l allows.
    if (take_pos == 0 && l >= 2 && !pos.empty() && take_neg >= 2) {
        take_pos = 1;
        --take_neg;
    }
    if (take_neg == 0 && l >= 2 && !neg.empty() && take_pos >= 2) {
        take_neg = 1;
        --take_pos;
    }
    if (take_pos == 0 || take_neg == 0)
        throw DataError("labeled pool cannot contain both classes at this ratio");

    PartialDataset pd;
    pd.feature_dim = train.feature_dim;
    auto emit = [&](const std::vector<std::size_t>& idx, std::size_t take) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i < take) {
                pd.labeled_examples.push_back(train.examples[idx[i]]);
                pd.labeled_labels.push_back(train.labels[idx[i]]);
            } else {
                pd.unlabeled_examples.push_back(train.examples[idx[i]]);
                pd.hidden_truth.push_back(train.labels[idx[i]]);
            }
        }
    };
    emit(pos, take_pos);
    emit(neg, take_neg);
    return pd;
}

Dataset generate_two_gaussians(std::size_t n_per_class, std::size_t dim, double separation,
                               double noise_flip_rate, std::uint64_t seed) {
    if (n_per_class < 1 || dim < 1) throw std::invalid_argument("n_per_class and dim must be >= 1");
    if (separation < 0.0) throw std::invalid_argument("separation must be >= 0");
    if (!(noise_flip_rate >= 0.0 && noise_flip_rate < 0.5))
        throw std::invalid_argument("noise_flip_rate must be in [0,0.5)");

    Dataset d;
    d.feature_dim = dim;
    d.name = "synthetic";
    Rng rng(derive_seed(seed, 0xda7a));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int cls : {+1, -1}) {
        const double mean = cls * separation / 2.0;
        for (std::size_t i = 0; i < n_per_class; ++i) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) x[j] = mean + gauss(rng);
            int y = cls;
            if (unif(rng) < noise_flip_rate) y = -y;
            d.examples.push_back(std::move(x));
            d.labels.push_back(y);
        }
    }
    return d;
}

}  // namespace dualteach
