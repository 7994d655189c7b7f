#include "ahc/ml.hpp"

#include "ahc/metrics.hpp"
#include "ahc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace ahc {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (c >= 'a' && c <= 'z') {
            cur.push_back(ch);
        } else if (c >= 'A' && c <= 'Z') {
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (c >= '0' && c <= '9') {
            cur.push_back(ch);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, int min_df) {
    if (docs.empty()) throw EmptyCorpus("cannot build a vocabulary from zero documents");
    std::map<std::string, int> df;  // ordered so columns come out sorted
    std::vector<std::string> seen;
    for (const auto& doc : docs) {
        seen.assign(doc.begin(), doc.end());
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (const auto& tok : seen) ++df[tok];
    }
    Vocabulary v;
    v.documents = static_cast<int>(docs.size());
    for (const auto& [tok, count] : df) {
        if (count < min_df) continue;
        const int col = static_cast<int>(v.tokens.size());
        v.index.emplace(tok, col);
        v.tokens.push_back(tok);
        v.idf.push_back(std::log((1.0 + v.documents) / (1.0 + count)) + 1.0);
    }
    return v;
}

Vocabulary build_vocabulary(const std::vector<std::string>& texts, int min_df) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(tokenize(t));
    return build_vocabulary(docs, min_df);
}

FeatureVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<int, int> tf;  // column -> count, ordered so idx is increasing
    for (const auto& tok : tokens) {
        const int col = vocab.column(tok);
        if (col >= 0) ++tf[col];
    }
    FeatureVector f;
    f.idx.reserve(tf.size());
    f.val.reserve(tf.size());
    double sq = 0.0;
    for (const auto& [col, count] : tf) {
        const double w = count * vocab.idf[col];
        f.idx.push_back(col);
        f.val.push_back(w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (double& w : f.val) w *= inv;
    }
    return f;
}

FeatureVector vectorize(std::string_view text, const Vocabulary& vocab) {
    return vectorize(tokenize(text), vocab);
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double PredicateClassifier::decision_value(const FeatureVector& x) const {
    double z = bias;
    for (int k = 0; k < x.nnz(); ++k) z += weights[x.idx[k]] * x.val[k];
    return z;
}

double PredicateClassifier::predict(const FeatureVector& x) const {
    if (!trained) return prior;
    return sigmoid(decision_value(x));
}

std::pair<double, double> class_weights(const ExampleSet& examples) {
    long pos = 0;
    for (const Example& e : examples) pos += e.label == 1;
    const long n = static_cast<long>(examples.size());
    const long neg = n - pos;
    if (pos == 0 || neg == 0) return {1.0, 1.0};
    return {n / (2.0 * neg), n / (2.0 * pos)};
}

namespace {

// Examples flattened into one contiguous sparse matrix; gradient-descent
// epochs then run without pointer chasing.
struct FlatExamples {
    std::vector<int> offset;  // n + 1
    std::vector<int> idx;
    std::vector<double> val;
    std::vector<signed char> y;
    int n = 0;
};

FlatExamples flatten(const ExampleSet& examples) {
    FlatExamples fe;
    fe.n = static_cast<int>(examples.size());
    fe.offset.reserve(fe.n + 1);
    fe.offset.push_back(0);
    std::size_t nnz = 0;
    for (const Example& e : examples) nnz += e.x->idx.size();
    fe.idx.reserve(nnz);
    fe.val.reserve(nnz);
    fe.y.reserve(fe.n);
    for (const Example& e : examples) {
        fe.idx.insert(fe.idx.end(), e.x->idx.begin(), e.x->idx.end());
        fe.val.insert(fe.val.end(), e.x->val.begin(), e.x->val.end());
        fe.offset.push_back(static_cast<int>(fe.idx.size()));
        fe.y.push_back(static_cast<signed char>(e.label));
    }
    return fe;
}

// Single source of truth for the objective; both the public gradient entry
// point and the training loop call this.
double loss_and_gradient(const FlatExamples& fe, std::span<const double> w, double bias, double l2,
                         double c_neg, double c_pos, std::vector<double>* grad_w, double* grad_b) {
    if (grad_w) grad_w->assign(w.size(), 0.0);
    double gb = 0.0;
    double loss = 0.0;
    for (int i = 0; i < fe.n; ++i) {
        double z = bias;
        for (int k = fe.offset[i]; k < fe.offset[i + 1]; ++k) z += w[fe.idx[k]] * fe.val[k];
        const int y = fe.y[i];
        const double c = y == 1 ? c_pos : c_neg;
        const double margin = y == 1 ? z : -z;
        loss += c * (std::max(-margin, 0.0) + std::log1p(std::exp(-std::abs(margin))));
        if (grad_w || grad_b) {
            const double r = c * (sigmoid(z) - y);
            if (grad_w) {
                for (int k = fe.offset[i]; k < fe.offset[i + 1]; ++k)
                    (*grad_w)[fe.idx[k]] += r * fe.val[k];
            }
            gb += r;
        }
    }
    const double inv_n = fe.n > 0 ? 1.0 / fe.n : 0.0;
    loss *= inv_n;
    double sq = 0.0;
    for (double wi : w) sq += wi * wi;
    loss += 0.5 * l2 * sq;
    if (grad_w) {
        for (std::size_t j = 0; j < w.size(); ++j) (*grad_w)[j] = (*grad_w)[j] * inv_n + l2 * w[j];
    }
    if (grad_b) *grad_b = gb * inv_n;
    return loss;
}

}  // namespace

double lr_loss_and_gradient(const ExampleSet& examples, std::span<const double> w, double bias,
                            double l2, double c_neg, double c_pos, std::vector<double>* grad_w,
                            double* grad_b) {
    return loss_and_gradient(flatten(examples), w, bias, l2, c_neg, c_pos, grad_w, grad_b);
}

PredicateClassifier train_classifier(int predicate_id, const ExampleSet& examples, int dim,
                                     const TrainOptions& opt) {
    PredicateClassifier clf;
    clf.predicate_id = predicate_id;
    clf.l2_penalty = opt.l2_penalty;
    clf.trained_on = static_cast<int>(examples.size());
    clf.weights.assign(dim, 0.0);

    long pos = 0;
    for (const Example& e : examples) pos += e.label == 1;
    clf.prior = estimate_selectivity(static_cast<int>(pos), static_cast<int>(examples.size()));
    if (pos == 0 || pos == static_cast<long>(examples.size())) return clf;  // single class

    clf.trained = true;
    double c_neg = 1.0, c_pos = 1.0;
    if (opt.class_weighting) std::tie(c_neg, c_pos) = class_weights(examples);

    const FlatExamples fe = flatten(examples);
    std::vector<double> grad(dim);
    double grad_b = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        const double loss =
            loss_and_gradient(fe, clf.weights, clf.bias, opt.l2_penalty, c_neg, c_pos, &grad, &grad_b);
        if (opt.record_loss) clf.loss_history.push_back(loss);
        if (opt.loss_tol > 0.0 && prev - loss < opt.loss_tol * std::max(prev, 1e-12)) break;
        for (int j = 0; j < dim; ++j) clf.weights[j] -= opt.learning_rate * grad[j];
        clf.bias -= opt.learning_rate * grad_b;
        prev = loss;
    }
    return clf;
}

void AccuracyHistory::add(int labels, double fbeta) {
    if (!points.empty() && labels <= points.back().labels) {
        throw std::invalid_argument("accuracy history label counts must strictly increase");
    }
    points.push_back({labels, fbeta});
}

std::vector<double> AccuracyHistory::fbetas() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Point& p : points) out.push_back(p.fbeta);
    return out;
}

CvResult cross_validated_fbeta(const ExampleSet& examples, int dim, const CvOptions& opt) {
    const int n = static_cast<int>(examples.size());
    std::vector<int> pos_idx, neg_idx;
    for (int i = 0; i < n; ++i) (examples[i].label == 1 ? pos_idx : neg_idx).push_back(i);
    if (n < opt.folds || pos_idx.empty() || neg_idx.empty()) return {0.0, true};

    Rng rng(opt.seed);
    rng.shuffle(pos_idx);
    rng.shuffle(neg_idx);
    std::vector<int> fold_of(n);
    for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_of[pos_idx[i]] = static_cast<int>(i) % opt.folds;
    for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_of[neg_idx[i]] = static_cast<int>(i) % opt.folds;

    double sum = 0.0;
    int evaluated = 0;
    ExampleSet train_set;
    for (int f = 0; f < opt.folds; ++f) {
        train_set.clear();
        long tp = 0, fp = 0, fn = 0;
        bool any_test = false;
        for (int i = 0; i < n; ++i) {
            if (fold_of[i] != f) train_set.push_back(examples[i]);
        }
        const PredicateClassifier clf = train_classifier(0, train_set, dim, opt.train);
        for (int i = 0; i < n; ++i) {
            if (fold_of[i] != f) continue;
            any_test = true;
            const bool predicted = clf.predict(*examples[i].x) >= 0.5;
            if (predicted && examples[i].label == 1) ++tp;
            else if (predicted) ++fp;
            else if (examples[i].label == 1) ++fn;
        }
        if (!any_test) continue;
        sum += fbeta_score(tp, fp, fn, opt.beta);
        ++evaluated;
    }
    if (evaluated == 0) return {0.0, true};
    return {sum / evaluated, false};
}

}  // namespace ahc
