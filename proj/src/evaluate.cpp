#include "cafe/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

#include "cafe/error.hpp"

namespace cafe {

LabeledDataset make_dataset(const Matrix& embedding, const NodeIndex& nodes,
                            const std::map<std::string, std::string>& labels) {
    if (static_cast<std::size_t>(embedding.rows()) != nodes.size())
        throw InputError("embedding rows do not match the node count");
    LabeledDataset data;
    std::set<std::string> names;
    for (const auto& [node, cls] : labels) names.insert(cls);
    data.class_names.assign(names.begin(), names.end());
    data.classes = data.class_names.size();

    std::vector<std::size_t> rows;
    for (std::size_t u = 0; u < nodes.size(); ++u) {
        auto it = labels.find(nodes.label(u));
        if (it == labels.end()) continue;
        rows.push_back(u);
        const auto pos = std::lower_bound(data.class_names.begin(), data.class_names.end(), it->second);
        data.labels.push_back(static_cast<std::size_t>(pos - data.class_names.begin()));
    }
    for (const auto& [node, cls] : labels)
        if (!nodes.contains(node)) throw InputError("label for unknown node '" + node + "'");
    data.features.resize(static_cast<Eigen::Index>(rows.size()), embedding.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        data.features.row(static_cast<Eigen::Index>(i)) = embedding.row(static_cast<Eigen::Index>(rows[i]));
    return data;
}

std::map<std::string, std::string> load_labels(const std::string& path, const NodeIndex* nodes) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open label file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            throw InputError(path + ":" + std::to_string(lineno) + ": expected node<TAB>class");
        std::string node = line.substr(0, tab);
        std::string cls = line.substr(tab + 1);
        if (nodes && !nodes->contains(node))
            throw InputError(path + ":" + std::to_string(lineno) + ": label for absent node '" + node + "'");
        auto [it, inserted] = out.emplace(node, cls);
        if (!inserted && it->second != cls)
            throw InputError(path + ":" + std::to_string(lineno) + ": conflicting class for node '" + node + "'");
    }
    return out;
}

Matrix SoftmaxRegression::design(const Matrix& x) const {
    Matrix d(x.rows(), x.cols() + 1);
    d.leftCols(x.cols()) = (x.rowwise() - mean_).array().rowwise() / scale_.array();
    d.col(x.cols()).setOnes();
    return d;
}

void SoftmaxRegression::fit(const Matrix& x, std::span<const std::size_t> y, std::size_t classes) {
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) throw InputError("bad training set");
    if (classes < 2) throw InputError("classification needs at least two classes");
    const double n = static_cast<double>(x.rows());
    mean_ = x.colwise().mean();
    scale_ = ((x.rowwise() - mean_).array().square().colwise().sum() / n).sqrt();
    for (Eigen::Index j = 0; j < scale_.size(); ++j)
        if (!(scale_(j) > 1e-12)) scale_(j) = 1.0;
    const Matrix d = design(x);
    Matrix target = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(classes));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] >= classes) throw InputError("class id out of range");
        target(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(y[i])) = 1.0;
    }
    weights_ = Matrix::Zero(d.cols(), static_cast<Eigen::Index>(classes));
    Matrix penalty_mask = Matrix::Ones(d.cols(), static_cast<Eigen::Index>(classes));
    penalty_mask.row(d.cols() - 1).setZero();
    for (std::size_t it = 0; it < options_.iterations; ++it) {
        Matrix p = d * weights_;
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            p.row(i).array() -= p.row(i).maxCoeff();
            p.row(i) = p.row(i).array().exp();
            p.row(i) /= p.row(i).sum();
        }
        const Matrix grad = d.transpose() * (p - target) / n + options_.l2 * weights_.cwiseProduct(penalty_mask);
        weights_ -= options_.step * grad;
    }
}

Matrix SoftmaxRegression::predict_proba(const Matrix& x) const {
    if (weights_.size() == 0) throw InvariantError("classifier used before fit");
    Matrix p = design(x) * weights_;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        p.row(i).array() -= p.row(i).maxCoeff();
        p.row(i) = p.row(i).array().exp();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

std::vector<std::size_t> SoftmaxRegression::predict(const Matrix& x) const {
    const Matrix p = predict_proba(x);
    std::vector<std::size_t> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index best = 0;
        p.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    }
    return out;
}

std::mt19937_64 repetition_rng(std::uint64_t seed, std::size_t repetition) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(repetition), static_cast<std::uint32_t>(repetition >> 32)};
    return std::mt19937_64(seq);
}

Split stratified_split(std::span<const std::size_t> labels, std::size_t classes, double train_fraction,
                       std::mt19937_64& rng) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must lie in (0, 1)");
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= classes) throw InputError("class id out of range");
        members[labels[i]].push_back(i);
    }
    Split s;
    for (std::size_t c = 0; c < classes; ++c) {
        auto& m = members[c];
        if (m.empty()) continue;
        std::shuffle(m.begin(), m.end(), rng);
        std::size_t take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m.size())));
        if (m.size() == 1) {
            take = 1;
            s.train_only_classes.push_back(c);
        } else {
            take = std::clamp<std::size_t>(take, 1, m.size() - 1);
        }
        s.train.insert(s.train.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(take));
        s.test.insert(s.test.end(), m.begin() + static_cast<std::ptrdiff_t>(take), m.end());
    }
    if (s.test.empty()) throw InputError("train fraction leaves an empty test set");
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

double accuracy(std::span<const std::size_t> truth, std::span<const std::size_t> predicted) {
    if (truth.size() != predicted.size() || truth.empty()) throw InputError("accuracy needs matching nonempty inputs");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

namespace {

double f1_for(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t cls) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == cls;
        const bool p = predicted[i] == cls;
        tp += t && p;
        fp += !t && p;
        fn += t && !p;
    }
    if (tp == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

double macro_f1(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t classes) {
    if (truth.size() != predicted.size() || truth.empty()) throw InputError("macro_f1 needs matching nonempty inputs");
    std::vector<char> seen(classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes || predicted[i] >= classes) throw InputError("class id out of range");
        seen[truth[i]] = seen[predicted[i]] = 1;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < classes; ++c)
        if (seen[c]) {
            sum += f1_for(truth, predicted, c);
            ++count;
        }
    return sum / static_cast<double>(count);
}

double binary_f1(std::span<const std::size_t> truth, std::span<const std::size_t> predicted) {
    if (truth.size() != predicted.size() || truth.empty()) throw InputError("binary_f1 needs matching nonempty inputs");
    return f1_for(truth, predicted, 1);
}

double roc_auc(std::span<const double> scores, std::span<const char> positive) {
    if (scores.size() != positive.size()) throw InputError("roc_auc needs matching inputs");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t t = i; t < j; ++t)
            if (positive[order[t]]) {
                rank_sum += avg;
                ++pos;
            }
        i = j;
    }
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) return std::numeric_limits<double>::quiet_NaN();
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double roc_auc_ovr(const Matrix& proba, std::span<const std::size_t> truth) {
    if (static_cast<std::size_t>(proba.rows()) != truth.size()) throw InputError("roc_auc_ovr needs matching inputs");
    std::vector<double> scores(truth.size());
    std::vector<char> positive(truth.size());
    double sum = 0.0;
    for (Eigen::Index c = 0; c < proba.cols(); ++c) {
        for (std::size_t i = 0; i < truth.size(); ++i) {
            scores[i] = proba(static_cast<Eigen::Index>(i), c);
            positive[i] = truth[i] == static_cast<std::size_t>(c);
        }
        const double auc = roc_auc(scores, positive);
        if (std::isnan(auc)) return auc;
        sum += auc;
    }
    return sum / static_cast<double>(proba.cols());
}

namespace {

struct Accumulator {
    std::vector<double> values;
    void add(double v) {
        if (!std::isnan(v)) values.push_back(v);
    }
    MetricStat stat() const {
        MetricStat s;
        s.count = values.size();
        if (values.empty()) return s;
        for (double v : values) s.mean += v;
        s.mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(var / static_cast<double>(values.size()));
        return s;
    }
};

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

std::vector<std::size_t> take(std::span<const std::size_t> v, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace

MetricSummary classify(const LabeledDataset& data, double train_fraction, std::size_t repetitions, std::uint64_t seed) {
    if (repetitions < 1) throw InputError("repetitions must be positive");
    if (static_cast<std::size_t>(data.features.rows()) != data.labels.size()) throw InputError("dataset rows and labels differ");
    if (data.classes < 2) throw InputError("classification needs at least two classes");
    std::vector<std::size_t> sizes(data.classes, 0);
    for (std::size_t l : data.labels) ++sizes.at(l);
    const bool singleton = std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 1; });

    Accumulator acc;
    Accumulator f1;
    Accumulator auc;
    MetricSummary out;
    out.repetitions = repetitions;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        auto rng = repetition_rng(seed, rep);
        const Split split = stratified_split(data.labels, data.classes, train_fraction, rng);
        if (rep == 0) out.train_only_classes = split.train_only_classes;
        SoftmaxRegression model;
        const auto y_train = take(data.labels, split.train);
        const auto y_test = take(data.labels, split.test);
        model.fit(take_rows(data.features, split.train), y_train, data.classes);
        const Matrix x_test = take_rows(data.features, split.test);
        const Matrix proba = model.predict_proba(x_test);
        std::vector<std::size_t> pred(y_test.size());
        for (Eigen::Index i = 0; i < proba.rows(); ++i) {
            Eigen::Index best = 0;
            proba.row(i).maxCoeff(&best);
            pred[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
        }
        acc.add(accuracy(y_test, pred));
        f1.add(macro_f1(y_test, pred, data.classes));
        if (!singleton) auc.add(roc_auc_ovr(proba, y_test));
    }
    out.accuracy = acc.stat();
    out.f1 = f1.stat();
    out.roc_auc = auc.stat();
    return out;
}

MetricSummary link_predict(const SampledGraph& graph, const Matrix& embedding, double train_fraction,
                           std::size_t repetitions, std::uint64_t seed) {
    const std::size_t n = graph.size();
    if (static_cast<std::size_t>(embedding.rows()) != n) throw InputError("embedding rows do not match the graph");
    if (repetitions < 1) throw InputError("repetitions must be positive");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::unordered_set<std::uint64_t> edge_keys;
    auto key = [n](std::size_t u, std::size_t w) { return static_cast<std::uint64_t>(u) * n + w; };
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w : graph.neighbors(u))
            if (u < w) {
                edges.emplace_back(u, w);
                edge_keys.insert(key(u, w));
            }
    if (edges.size() < 10) throw InputError("link prediction needs at least 10 edges");
    const std::size_t pairs = n * (n - 1) / 2;
    if (pairs - edges.size() < edges.size()) throw InputError("graph too dense to sample negatives");

    const Eigen::Index c = embedding.cols();
    Accumulator acc;
    Accumulator f1;
    Accumulator auc;
    MetricSummary out;
    out.repetitions = repetitions;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        auto rng = repetition_rng(seed, rep);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::pair<std::size_t, std::size_t>> negatives;
        std::unordered_set<std::uint64_t> taken;
        while (negatives.size() < edges.size()) {
            std::size_t u = pick(rng);
            std::size_t w = pick(rng);
            if (u == w) continue;
            if (u > w) std::swap(u, w);
            const auto k = key(u, w);
            if (edge_keys.count(k) || !taken.insert(k).second) continue;
            negatives.emplace_back(u, w);
        }
        const std::size_t total = 2 * edges.size();
        Matrix features(static_cast<Eigen::Index>(total), 2 * c);
        std::vector<std::size_t> labels(total);
        for (std::size_t i = 0; i < total; ++i) {
            const bool pos = i < edges.size();
            const auto [u, w] = pos ? edges[i] : negatives[i - edges.size()];
            const auto row = static_cast<Eigen::Index>(i);
            features.row(row).head(c) = embedding.row(static_cast<Eigen::Index>(u));
            features.row(row).tail(c) = embedding.row(static_cast<Eigen::Index>(w));
            labels[i] = pos ? 1 : 0;
        }
        const Split split = stratified_split(labels, 2, train_fraction, rng);
        SoftmaxRegression model;
        const auto y_train = take(labels, split.train);
        const auto y_test = take(labels, split.test);
        model.fit(take_rows(features, split.train), y_train, 2);
        const Matrix proba = model.predict_proba(take_rows(features, split.test));
        std::vector<std::size_t> pred(y_test.size());
        std::vector<double> scores(y_test.size());
        std::vector<char> positive(y_test.size());
        for (std::size_t i = 0; i < y_test.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            pred[i] = proba(row, 1) > proba(row, 0) ? 1 : 0;
            scores[i] = proba(row, 1);
            positive[i] = y_test[i] == 1;
        }
        acc.add(accuracy(y_test, pred));
        f1.add(binary_f1(y_test, pred));
        auc.add(roc_auc(scores, positive));
    }
    out.accuracy = acc.stat();
    out.f1 = f1.stat();
    out.roc_auc = auc.stat();
    return out;
}

}  // namespace cafe
