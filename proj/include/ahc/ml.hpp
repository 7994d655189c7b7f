#pragma once

#include "ahc/core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ahc {

// Lowercases, turns everything but [a-z0-9] into spaces, splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);

struct Vocabulary {
    std::unordered_map<std::string, int> index;  // token -> column
    std::vector<std::string> tokens;             // column -> token
    std::vector<double> idf;                     // per column
    int documents = 0;

    int size() const { return static_cast<int>(tokens.size()); }
    int column(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? -1 : it->second;
    }
};

// Columns are assigned in lexicographic token order so downstream weight
// vectors do not depend on hash iteration order. Tokens in fewer than min_df
// documents are dropped. idf = ln((1+N)/(1+df)) + 1.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, int min_df = 2);
Vocabulary build_vocabulary(const std::vector<std::string>& texts, int min_df = 2);

struct FeatureVector {
    std::vector<int> idx;     // strictly increasing
    std::vector<double> val;  // parallel to idx
    int nnz() const { return static_cast<int>(idx.size()); }
};

// tf-idf, L2-normalized; out-of-vocabulary tokens are ignored, so all-OOV or
// empty text yields the zero vector.
FeatureVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab);
FeatureVector vectorize(std::string_view text, const Vocabulary& vocab);

struct Example {
    const FeatureVector* x = nullptr;
    int label = 0;  // 0 or 1
};
using ExampleSet = std::vector<Example>;

struct TrainOptions {
    double l2_penalty = 1e-4;
    double learning_rate = 0.5;
    int epochs = 300;
    bool class_weighting = true;
    double loss_tol = 1e-7;  // early stop when the relative loss drop falls below; 0 disables
    bool record_loss = false;
};

struct PredicateClassifier {
    int predicate_id = 0;
    std::vector<double> weights;
    double bias = 0.0;
    double l2_penalty = 0.0;
    int trained_on = 0;
    bool trained = false;              // untrained classifiers predict the class prior
    double prior = 0.5;                // Laplace-smoothed positive rate of the training set
    std::vector<double> loss_history;  // one entry per epoch when TrainOptions::record_loss

    double decision_value(const FeatureVector& x) const;  // w.x + b
    double predict(const FeatureVector& x) const;         // probability of the positive class
};

double sigmoid(double z);

// (c_neg, c_pos) with c_y = n / (2 n_y); (1, 1) when either class is absent.
std::pair<double, double> class_weights(const ExampleSet& examples);

// Mean per-class-weighted logistic loss plus l2 * ||w||^2 / 2 (bias is not
// regularized). Gradients are written when the out-pointers are non-null.
double lr_loss_and_gradient(const ExampleSet& examples, std::span<const double> w, double bias,
                            double l2, double c_neg, double c_pos, std::vector<double>* grad_w,
                            double* grad_b);

// Full-batch gradient descent from zero initialization; deterministic given
// inputs. A single-class or empty example set yields an untrained classifier
// that predicts its class prior.
PredicateClassifier train_classifier(int predicate_id, const ExampleSet& examples, int dim,
                                     const TrainOptions& opt = {});

struct AccuracyHistory {
    struct Point {
        int labels = 0;
        double fbeta = 0.0;
    };
    std::vector<Point> points;

    // Label counts must be strictly increasing.
    void add(int labels, double fbeta);
    std::vector<double> fbetas() const;
};

struct CvOptions {
    int folds = 5;
    double beta = 3.0;
    std::uint64_t seed = 0;
    TrainOptions train;
};

struct CvResult {
    double fbeta = 0.0;
    bool insufficient = false;  // too few examples or single class; callers keep learning
};

// Stratified k-fold F_beta at decision threshold 0.5. Requires |examples| >=
// folds and both classes present; folds that end up with no test examples are
// skipped.
CvResult cross_validated_fbeta(const ExampleSet& examples, int dim, const CvOptions& opt);

}  // namespace ahc
