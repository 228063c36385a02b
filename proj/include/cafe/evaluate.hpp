#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cafe/matrix.hpp"
#include "cafe/sampled_graph.hpp"

namespace cafe {

struct LabeledDataset {
    Matrix features;                  ///< one row per labeled item
    std::vector<std::size_t> labels;  ///< class id per row
    std::size_t classes = 0;
    std::vector<std::string> class_names;
};

/// Rows of `embedding` (indexed like `nodes`) that carry a label, in node
/// order. Class ids follow the sorted class names.
LabeledDataset make_dataset(const Matrix& embedding, const NodeIndex& nodes,
                            const std::map<std::string, std::string>& labels);

/// `node<TAB>class` lines. Consistent duplicates collapse; conflicting ones
/// and, when `nodes` is given, unknown nodes are errors.
std::map<std::string, std::string> load_labels(const std::string& path, const NodeIndex* nodes = nullptr);

struct MetricStat {
    double mean = 0.0;
    double stddev = 0.0;  ///< population standard deviation over repetitions
    std::size_t count = 0;  ///< repetitions that produced a value
    bool applicable() const { return count > 0; }
};

struct MetricSummary {
    MetricStat accuracy;
    MetricStat f1;  ///< macro-F1 for classification, positive-class F1 for links
    MetricStat roc_auc;
    std::size_t repetitions = 0;
    std::vector<std::size_t> train_only_classes;  ///< singletons that could not be split
};

/// Multinomial logistic regression: L2 1e-4, 500 full-batch gradient steps
/// of size 0.1 on features standardized with the training statistics.
class SoftmaxRegression {
public:
    struct Options {
        double l2 = 1e-4;
        std::size_t iterations = 500;
        double step = 0.1;
    };

    SoftmaxRegression() = default;
    explicit SoftmaxRegression(Options options) : options_(options) {}

    void fit(const Matrix& x, std::span<const std::size_t> y, std::size_t classes);
    Matrix predict_proba(const Matrix& x) const;
    std::vector<std::size_t> predict(const Matrix& x) const;

private:
    Matrix design(const Matrix& x) const;

    Options options_;
    Eigen::RowVectorXd mean_;
    Eigen::RowVectorXd scale_;
    Matrix weights_;  ///< (d + 1) x classes, last row is the bias
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> train_only_classes;
};

/// Per-class shuffle; round(fraction * size) members go to train, clamped
/// so that classes with 2+ members appear on both sides.
Split stratified_split(std::span<const std::size_t> labels, std::size_t classes, double train_fraction,
                       std::mt19937_64& rng);

/// Independent stream for one repetition.
std::mt19937_64 repetition_rng(std::uint64_t seed, std::size_t repetition);

double accuracy(std::span<const std::size_t> truth, std::span<const std::size_t> predicted);
/// Mean F1 over classes seen in truth or prediction.
double macro_f1(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t classes);
double binary_f1(std::span<const std::size_t> truth, std::span<const std::size_t> predicted);
/// Mann-Whitney AUC with tied scores sharing their average rank.
double roc_auc(std::span<const double> scores, std::span<const char> positive);
/// Macro average of one-vs-rest AUC; NaN when some class has no positive or no negative.
double roc_auc_ovr(const Matrix& proba, std::span<const std::size_t> truth);

MetricSummary classify(const LabeledDataset& data, double train_fraction, std::size_t repetitions, std::uint64_t seed);

/// Edges versus an equal number of sampled non-edges; features [h_u | h_w] with u < w.
MetricSummary link_predict(const SampledGraph& graph, const Matrix& embedding, double train_fraction,
                           std::size_t repetitions, std::uint64_t seed);

}  // namespace cafe
