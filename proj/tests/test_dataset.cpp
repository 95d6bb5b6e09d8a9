#include "dualteach/dataset.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "dualteach/learners.hpp"
#include "dualteach/rng.hpp"

using namespace dualteach;

TEST_CASE("parse_libsvm dense expansion") {
    Dataset d = parse_libsvm("+1 1:0.5 3:-1.2\n-1 2:2.0");
    CHECK(d.size() == 2);
    CHECK(d.feature_dim == 3);
    CHECK(d.labels == std::vector<int>{1, -1});
    CHECK(d.examples[0] == std::vector<double>{0.5, 0.0, -1.2});
    CHECK(d.examples[1] == std::vector<double>{0.0, 2.0, 0.0});
}

TEST_CASE("parse_libsvm degenerate record promotes feature_dim to 1") {
    Dataset d = parse_libsvm("-1\n");
    CHECK(d.size() == 1);
    CHECK(d.feature_dim == 1);
    CHECK(d.examples[0] == std::vector<double>{0.0});
    CHECK(d.labels[0] == -1);
}

TEST_CASE("parse_libsvm grammar violations carry line numbers") {
    SUBCASE("non-increasing indices") {
        try {
            parse_libsvm("+1 2:1 1:1");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
        }
    }
    SUBCASE("duplicate index") {
        try {
            parse_libsvm("+1 1:1\n-1 2:1 2:3");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("non-numeric token") {
        try {
            parse_libsvm("+1 1:1\n-1 1:1\nfoo 1:1");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("index zero") {
        CHECK_THROWS_AS(parse_libsvm("+1 0:1"), ParseError);
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(parse_libsvm(""), ParseError);
        CHECK_THROWS_AS(parse_libsvm("\n\n"), ParseError);
    }
}

TEST_CASE("parse_libsvm maps two non-canonical labels by sign of order") {
    Dataset d = parse_libsvm("0 1:1\n2 1:2\n0 1:3");
    CHECK(d.labels == std::vector<int>{-1, 1, -1});
    CHECK_THROWS_AS(parse_libsvm("0 1:1\n2 1:2\n3 1:3"), ParseError);
}

TEST_CASE("parse-serialize-parse round trip" * doctest::description("1000 random sparse records")) {
    Rng rng(12345);
    std::uniform_int_distribution<int> dim_dist(1, 30);
    std::uniform_real_distribution<double> val_dist(-10.0, 10.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t dim = 30;
    Dataset d;
    d.feature_dim = dim;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j)
            if (unif(rng) < 0.2) x[j] = val_dist(rng);
        d.examples.push_back(x);
        d.labels.push_back(unif(rng) < 0.5 ? 1 : -1);
    }
    Dataset back = parse_libsvm(serialize_libsvm(d));
    CHECK(back.feature_dim == d.feature_dim);
    CHECK(back.labels == d.labels);
    CHECK(back.examples == d.examples);
}

TEST_CASE("normalize_features min-max on train only") {
    Dataset train;
    train.feature_dim = 2;
    train.examples = {{-1.0, 3.0}, {0.0, 3.0}, {1.0, 3.0}};
    train.labels = {1, -1, 1};
    Dataset test = train;
    test.examples = {{2.0, 5.0}};
    test.labels = {1};

    auto [ntrain, rest] = normalize_features(train, {test});
    CHECK(ntrain.examples[0][0] == doctest::Approx(0.0));
    CHECK(ntrain.examples[1][0] == doctest::Approx(0.5));
    CHECK(ntrain.examples[2][0] == doctest::Approx(1.0));
    // constant column maps to 0
    for (int i = 0; i < 3; ++i) CHECK(ntrain.examples[i][1] == 0.0);
    // same affine map applied out of range
    CHECK(rest[0].examples[0][0] == doctest::Approx(1.5));

    // refit on the normalized train set is idempotent
    auto [again, _] = normalize_features(ntrain, {});
    CHECK(again.examples == ntrain.examples);
}

TEST_CASE("split_train_test stratified counts and determinism") {
    Dataset d;
    d.feature_dim = 1;
    for (int i = 0; i < 100; ++i) {
        d.examples.push_back({static_cast<double>(i)});
        d.labels.push_back(i < 50 ? 1 : -1);
    }
    auto [train, test] = split_train_test(d, 0.75, 7);
    CHECK(train.size() == 75);
    CHECK(test.size() == 25);
    std::size_t pos = std::count(train.labels.begin(), train.labels.end(), 1);
    CHECK((pos == 37 || pos == 38));

    // union reconstructs the input multiset
    std::multiset<double> all;
    for (const auto& x : train.examples) all.insert(x[0]);
    for (const auto& x : test.examples) all.insert(x[0]);
    CHECK(all.size() == 100);
    CHECK(*all.begin() == 0.0);
    CHECK(*all.rbegin() == 99.0);

    auto [train2, test2] = split_train_test(d, 0.75, 7);
    CHECK(train.examples == train2.examples);
    CHECK(test.examples == test2.examples);
    auto [train3, test3] = split_train_test(d, 0.75, 8);
    CHECK(train.examples != train3.examples);
}

TEST_CASE("split_train_test forces stratification at small sizes") {
    Dataset d;
    d.feature_dim = 1;
    d.examples = {{0.0}, {1.0}, {2.0}, {3.0}};
    d.labels = {1, 1, -1, -1};
    auto [train, test] = split_train_test(d, 0.5, 3);
    REQUIRE(train.size() == 2);
    CHECK(std::count(train.labels.begin(), train.labels.end(), 1) == 1);
    CHECK(std::count(test.labels.begin(), test.labels.end(), 1) == 1);
}

TEST_CASE("split_train_test rejects a class with fewer than 2 examples") {
    Dataset d;
    d.feature_dim = 1;
    d.examples = {{0.0}, {1.0}, {2.0}};
    d.labels = {1, 1, -1};
    CHECK_THROWS_AS(split_train_test(d, 0.5, 0), DataError);
}

TEST_CASE("split_labeled_unlabeled counts") {
    Dataset d;
    d.feature_dim = 1;
    for (int i = 0; i < 270; ++i) {
        d.examples.push_back({static_cast<double>(i)});
        d.labels.push_back(i < 120 ? 1 : -1);
    }
    PartialDataset pd = split_labeled_unlabeled(d, 0.2, 11);
    CHECK(pd.labeled_count() == 54);
    CHECK(pd.unlabeled_count() == 216);
    CHECK(pd.hidden_truth.size() == 216);

    PartialDataset all = split_labeled_unlabeled(d, 1.0, 11);
    CHECK(all.labeled_count() == 270);
    CHECK(all.unlabeled_count() == 0);
}

TEST_CASE("split_labeled_unlabeled rejects a single-class labeled pool") {
    Dataset d;
    d.feature_dim = 1;
    for (int i = 0; i < 10; ++i) {
        d.examples.push_back({static_cast<double>(i)});
        d.labels.push_back(i < 9 ? 1 : -1);
    }
    CHECK_THROWS_AS(split_labeled_unlabeled(d, 0.1, 0), DataError);
}

TEST_CASE("generate_two_gaussians determinism and separability") {
    Dataset a = generate_two_gaussians(50, 2, 10.0, 0.0, 42);
    Dataset b = generate_two_gaussians(50, 2, 10.0, 0.0, 42);
    CHECK(a.examples == b.examples);
    CHECK(a.labels == b.labels);
    Dataset c = generate_two_gaussians(50, 2, 10.0, 0.0, 43);
    CHECK(a.examples != c.examples);

    // far-separated classes are fit perfectly by a linear model
    BaseLearnerSpec spec;
    spec.kind = LearnerKind::logistic;
    Model m = fit(spec, a.examples, a.labels, nullptr, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < a.size(); ++i) correct += predict(m, a.examples[i]) == a.labels[i];
    CHECK(static_cast<double>(correct) / static_cast<double>(a.size()) >= 0.99);
}

TEST_CASE("hidden truth does not influence training-facing views") {
    Dataset d = generate_two_gaussians(40, 3, 2.0, 0.05, 5);
    PartialDataset pd1 = split_labeled_unlabeled(d, 0.3, 9);
    PartialDataset pd2 = pd1;
    for (int& y : pd2.hidden_truth) y = -y;  // corrupt the hidden truth only

    BaseLearnerSpec spec;
    spec.kind = LearnerKind::linear_svm;
    TrainView v1 = pd1.train_view(), v2 = pd2.train_view();
    Model m1 = fit(spec, v1.labeled_examples, v1.labels, nullptr, 3);
    Model m2 = fit(spec, v2.labeled_examples, v2.labels, nullptr, 3);
    CHECK(m1 == m2);
}
