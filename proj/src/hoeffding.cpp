#include "sistream/hoeffding.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace sistream {
namespace detail {

namespace {

// Estimated per-element costs for the reported model size. These are
// fixed constants so the Size metric is comparable across platforms.
constexpr std::size_t kLeafBaseBytes = 64;
constexpr std::size_t kSplitBaseBytes = 96;
constexpr std::size_t kClassEntryBytes = 16;
constexpr std::size_t kEstimatorBytes = 48;

// Evidence required on both monitors before an alternate subtree is
// compared against the main one.
constexpr std::size_t kPromoteMinWidth = 100;

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

/// Single-feature, single-class Gaussian sketch with observed bounds.
struct GaussianEstimator {
    double weight = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double v) {
        weight += 1.0;
        const double delta = v - mean;
        mean += delta / weight;
        m2 += delta * (v - mean);
        if (v < min) min = v;
        if (v > max) max = v;
    }

    double stddev() const { return weight > 0.0 ? std::sqrt(m2 / weight) : 0.0; }

    // Estimated weight of mass at or below the threshold.
    double weight_below(double threshold) const {
        const double sd = stddev();
        if (sd > 0.0) return weight * phi((threshold - mean) / sd);
        return mean <= threshold ? weight : 0.0;
    }

    double log_density(double v) const {
        const double sd = std::max(stddev(), 1e-9);
        const double z = (v - mean) / sd;
        return -std::log(sd) - 0.5 * z * z;
    }
};

struct LeafStats {
    std::vector<double> class_weight;                     // by class id
    std::vector<std::vector<GaussianEstimator>> feature;  // [feature][class]
    double mc_correct = 0.0;
    double nb_correct = 0.0;
    double weight_at_last_eval = 0.0;

    double total_weight() const {
        double w = 0.0;
        for (double c : class_weight) w += c;
        return w;
    }

    std::size_t classes_present() const {
        std::size_t n = 0;
        for (double c : class_weight) n += c > 0.0;
        return n;
    }

    int majority() const {
        int best = -1;
        double best_w = 0.0;
        for (std::size_t c = 0; c < class_weight.size(); ++c) {
            if (class_weight[c] > best_w) {
                best_w = class_weight[c];
                best = static_cast<int>(c);
            }
        }
        return best;
    }
};

struct Node {
    bool is_leaf = true;
    LeafStats leaf;

    std::size_t split_feature = 0;
    double split_threshold = 0.0;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;

    // Adaptive-tree state, only populated on split nodes of a HAT.
    std::unique_ptr<Adwin> err_monitor;
    std::unique_ptr<Node> alternate;
    std::unique_ptr<Adwin> alt_monitor;
};

using NodePtr = std::unique_ptr<Node>;

struct SplitCandidate {
    double gain = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::vector<double> left_weights;
    std::vector<double> right_weights;
};

struct TreeImpl {
    TreeConfig cfg;
    bool adaptive = false;
    Adwin::Options monitor_opts;

    NodePtr root;
    std::size_t dim = 0;
    int default_class = -1;
    std::size_t splits = 0;

    void learn(const Instance& x);
    int predict(const Instance& x) const;
    void reset();
    std::size_t size_bytes() const;
    std::size_t node_count() const;

private:
    void learn_at(NodePtr& node, const Instance& x);
    void leaf_learn(NodePtr& node, const Instance& x);
    void try_split(NodePtr& node);
    int predict_from(const Node* node, const Instance& x) const;
    int leaf_predict(const LeafStats& stats, const Instance& x) const;
    int naive_bayes(const LeafStats& stats, const Instance& x) const;
};

namespace {

double entropy(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : weights) {
        if (w <= 0.0) continue;
        const double p = w / total;
        h -= p * std::log2(p);
    }
    return h;
}

std::size_t count_nodes(const Node* node) {
    if (!node) return 0;
    if (node->is_leaf) return 1;
    return 1 + count_nodes(node->left.get()) + count_nodes(node->right.get()) +
           count_nodes(node->alternate.get());
}

std::size_t node_size(const Node* node) {
    if (!node) return 0;
    if (node->is_leaf) {
        std::size_t bytes = kLeafBaseBytes + node->leaf.class_weight.size() * kClassEntryBytes;
        for (const auto& per_class : node->leaf.feature)
            bytes += per_class.size() * kEstimatorBytes;
        return bytes;
    }
    std::size_t bytes = kSplitBaseBytes + node_size(node->left.get()) +
                        node_size(node->right.get()) + node_size(node->alternate.get());
    if (node->err_monitor) bytes += node->err_monitor->size_bytes();
    if (node->alt_monitor) bytes += node->alt_monitor->size_bytes();
    return bytes;
}

}  // namespace

void TreeImpl::learn(const Instance& x) {
    if (!x.labeled()) throw std::invalid_argument("hoeffding tree: unlabeled instance");
    if (*x.label < 0) throw std::invalid_argument("hoeffding tree: negative class id");
    if (dim == 0) dim = x.dim();
    else if (x.dim() != dim)
        throw std::invalid_argument("hoeffding tree: dimension mismatch, tree has " +
                                    std::to_string(dim) + " features, instance has " +
                                    std::to_string(x.dim()));
    if (default_class < 0) default_class = *x.label;
    learn_at(root, x);
}

int TreeImpl::predict(const Instance& x) const {
    if (dim != 0 && x.dim() != dim)
        throw std::invalid_argument("hoeffding tree: dimension mismatch in predict");
    const int pred = predict_from(root.get(), x);
    if (pred >= 0) return pred;
    return default_class >= 0 ? default_class : 0;
}

void TreeImpl::reset() {
    root.reset();
    dim = 0;
    default_class = -1;
    splits = 0;
}

std::size_t TreeImpl::size_bytes() const { return 64 + node_size(root.get()); }

std::size_t TreeImpl::node_count() const { return count_nodes(root.get()); }

void TreeImpl::learn_at(NodePtr& node, const Instance& x) {
    if (!node) node = std::make_unique<Node>();
    if (node->is_leaf) {
        leaf_learn(node, x);
        return;
    }

    if (adaptive) {
        const int truth = *x.label;
        const bool change =
            node->err_monitor->update(predict_from(node.get(), x) == truth ? 0.0 : 1.0);
        if (change && !node->alternate) {
            node->alternate = std::make_unique<Node>();
            node->alt_monitor = std::make_unique<Adwin>(monitor_opts);
        }
        if (node->alternate) {
            node->alt_monitor->update(
                predict_from(node->alternate.get(), x) == truth ? 0.0 : 1.0);
            learn_at(node->alternate, x);
            if (node->err_monitor->width() >= kPromoteMinWidth &&
                node->alt_monitor->width() >= kPromoteMinWidth) {
                if (node->alt_monitor->estimate() < node->err_monitor->estimate()) {
                    NodePtr promoted = std::move(node->alternate);
                    node = std::move(promoted);
                    return;  // the promoted subtree already learned x
                }
                node->alternate.reset();  // trial lost, main stays
                node->alt_monitor.reset();
            }
        }
    }

    NodePtr& child =
        x.features[node->split_feature] <= node->split_threshold ? node->left : node->right;
    learn_at(child, x);
}

void TreeImpl::leaf_learn(NodePtr& node, const Instance& x) {
    LeafStats& stats = node->leaf;
    const std::size_t c = static_cast<std::size_t>(*x.label);

    // Leaf-local model comparison drives the adaptive leaf prediction;
    // both predictions are scored before this instance updates anything.
    if (cfg.leaf_prediction == LeafPrediction::naive_bayes_adaptive &&
        stats.total_weight() > 0.0) {
        if (stats.majority() == *x.label) stats.mc_correct += 1.0;
        if (naive_bayes(stats, x) == *x.label) stats.nb_correct += 1.0;
    }

    if (c >= stats.class_weight.size()) stats.class_weight.resize(c + 1, 0.0);
    stats.class_weight[c] += 1.0;
    if (stats.feature.empty()) stats.feature.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        auto& per_class = stats.feature[j];
        if (c >= per_class.size()) per_class.resize(c + 1);
        per_class[c].add(x.features[j]);
    }

    const double seen = stats.total_weight();
    if (seen - stats.weight_at_last_eval >= static_cast<double>(cfg.grace_period) &&
        stats.classes_present() > 1) {
        stats.weight_at_last_eval = seen;
        try_split(node);
    }
}

void TreeImpl::try_split(NodePtr& node) {
    const LeafStats& stats = node->leaf;
    const double pre_entropy = entropy(stats.class_weight);
    const double total = stats.total_weight();

    SplitCandidate best, second;
    for (std::size_t j = 0; j < stats.feature.size(); ++j) {
        const auto& per_class = stats.feature[j];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& est : per_class) {
            if (est.weight <= 0.0) continue;
            lo = std::min(lo, est.min);
            hi = std::max(hi, est.max);
        }
        if (!(hi > lo)) continue;

        SplitCandidate feature_best;
        for (int s = 1; s <= cfg.split_candidates; ++s) {
            const double thr = lo + (hi - lo) * s / (cfg.split_candidates + 1.0);
            std::vector<double> lhs(stats.class_weight.size(), 0.0);
            std::vector<double> rhs(stats.class_weight.size(), 0.0);
            for (std::size_t cid = 0; cid < stats.class_weight.size(); ++cid) {
                const double w = stats.class_weight[cid];
                if (w <= 0.0) continue;
                double below = cid < per_class.size() ? per_class[cid].weight_below(thr) : 0.0;
                below = std::clamp(below, 0.0, w);
                lhs[cid] = below;
                rhs[cid] = w - below;
            }
            double wl = 0.0, wr = 0.0;
            for (std::size_t cid = 0; cid < lhs.size(); ++cid) {
                wl += lhs[cid];
                wr += rhs[cid];
            }
            if (wl <= 0.0 || wr <= 0.0) continue;
            const double gain =
                pre_entropy - (wl * entropy(lhs) + wr * entropy(rhs)) / total;
            if (gain > feature_best.gain) {
                feature_best = SplitCandidate{gain, j, thr, std::move(lhs), std::move(rhs)};
            }
        }
        if (feature_best.gain > best.gain) {
            second = std::move(best);
            best = std::move(feature_best);
        } else if (feature_best.gain > second.gain) {
            second = std::move(feature_best);
        }
    }

    if (best.gain <= 0.0) return;
    const double bound = hoeffding_bound(
        {std::log2(static_cast<double>(stats.classes_present())),
         cfg.split_confidence_delta,
         static_cast<std::size_t>(total)});
    if (best.gain - second.gain <= bound && bound >= cfg.tie_threshold_tau) return;

    auto make_child = [](std::vector<double> weights) {
        auto child = std::make_unique<Node>();
        child->leaf.class_weight = std::move(weights);
        child->leaf.weight_at_last_eval = child->leaf.total_weight();
        return child;
    };

    auto split = std::make_unique<Node>();
    split->is_leaf = false;
    split->split_feature = best.feature;
    split->split_threshold = best.threshold;
    split->left = make_child(std::move(best.left_weights));
    split->right = make_child(std::move(best.right_weights));
    if (adaptive) split->err_monitor = std::make_unique<Adwin>(monitor_opts);
    node = std::move(split);
    ++splits;
}

int TreeImpl::predict_from(const Node* node, const Instance& x) const {
    while (node && !node->is_leaf)
        node = x.features[node->split_feature] <= node->split_threshold ? node->left.get()
                                                                        : node->right.get();
    if (!node) return -1;
    return leaf_predict(node->leaf, x);
}

int TreeImpl::leaf_predict(const LeafStats& stats, const Instance& x) const {
    if (stats.total_weight() <= 0.0) return -1;
    if (cfg.leaf_prediction == LeafPrediction::majority) return stats.majority();
    // Adaptive choice: use naive Bayes unless plain majority has been the
    // better leaf model so far.
    if (stats.mc_correct > stats.nb_correct) return stats.majority();
    return naive_bayes(stats, x);
}

int TreeImpl::naive_bayes(const LeafStats& stats, const Instance& x) const {
    if (stats.feature.empty()) return stats.majority();
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < stats.class_weight.size(); ++c) {
        if (stats.class_weight[c] <= 0.0) continue;
        double score = std::log(stats.class_weight[c]);
        for (std::size_t j = 0; j < stats.feature.size() && j < x.dim(); ++j) {
            const auto& per_class = stats.feature[j];
            if (c >= per_class.size() || per_class[c].weight <= 0.0) continue;
            score += per_class[c].log_density(x.features[j]);
        }
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(c);
        }
    }
    return best >= 0 ? best : stats.majority();
}

}  // namespace detail

HoeffdingTree::HoeffdingTree(TreeConfig cfg)
    : HoeffdingTree(cfg, false, Adwin::Options{}) {}

HoeffdingTree::HoeffdingTree(TreeConfig cfg, bool adaptive, Adwin::Options monitor)
    : impl_(std::make_unique<detail::TreeImpl>()) {
    if (cfg.grace_period == 0)
        throw std::invalid_argument("hoeffding tree: grace period must be >= 1");
    if (cfg.split_confidence_delta <= 0.0 || cfg.split_confidence_delta >= 1.0)
        throw std::invalid_argument("hoeffding tree: split confidence must be in (0, 1)");
    if (cfg.tie_threshold_tau < 0.0)
        throw std::invalid_argument("hoeffding tree: tie threshold must be >= 0");
    impl_->cfg = cfg;
    impl_->adaptive = adaptive;
    impl_->monitor_opts = monitor;
}

HoeffdingTree::~HoeffdingTree() = default;
HoeffdingTree::HoeffdingTree(HoeffdingTree&&) noexcept = default;
HoeffdingTree& HoeffdingTree::operator=(HoeffdingTree&&) noexcept = default;

void HoeffdingTree::learn_one(const Instance& x) { impl_->learn(x); }
int HoeffdingTree::predict_one(const Instance& x) const { return impl_->predict(x); }
void HoeffdingTree::reset() { impl_->reset(); }
std::size_t HoeffdingTree::size_bytes() const { return impl_->size_bytes(); }
const TreeConfig& HoeffdingTree::config() const { return impl_->cfg; }
std::size_t HoeffdingTree::node_count() const { return impl_->node_count(); }
std::size_t HoeffdingTree::split_count() const { return impl_->splits; }

HoeffdingAdaptiveTree::HoeffdingAdaptiveTree(TreeConfig cfg, Adwin::Options monitor)
    : HoeffdingTree(cfg, true, monitor) {}

}  // namespace sistream
