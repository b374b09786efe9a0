#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sistream/classifier.hpp"
#include "sistream/sis.hpp"
#include "sistream/stream.hpp"

namespace sistream {

/// Square count matrix indexed by (true class, predicted class). Grows as
/// new class ids appear.
class ConfusionMatrix {
public:
    void add(int truth, int predicted);

    std::uint64_t total() const { return total_; }
    std::size_t num_classes() const { return counts_.size(); }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const;
    std::uint64_t correct() const;
    double accuracy() const;
    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t col_sum(std::size_t predicted) const;

private:
    std::vector<std::vector<std::uint64_t>> counts_;
    std::uint64_t total_ = 0;

    void grow(std::size_t n);
};

/// Chance-corrected agreement (rho_o - rho_ran) / (1 - rho_ran), with the
/// chance term taken from the marginal products. Returns exactly 1 for a
/// matrix with all mass on a single diagonal cell.
double kappa(const ConfusionMatrix& cm);

struct PredictionRecord {
    std::size_t time_index = 0;
    int truth = 0;
    int predicted = 0;
    bool correct = false;
};

/// Sliding fraction of correct predictions: entry t covers the last
/// min(t+1, window) records.
std::vector<double> windowed_accuracy(std::span<const PredictionRecord> log,
                                      std::size_t window);

/// Trapezoidal integral of model size (KB) over elapsed time (seconds,
/// converted to hours). Series must be aligned and time non-decreasing.
double ram_hour_cost(std::span<const double> size_kb, std::span<const double> elapsed_seconds);

struct PrequentialReport {
    std::vector<PredictionRecord> log;
    std::vector<double> windowed;  // one value per instance
    ConfusionMatrix confusion;
    std::vector<std::string> label_names;

    double accuracy_pct = 0.0;
    double kappa_pct = 0.0;
    double learner_seconds = 0.0;  // CPU time inside learner calls only
    double model_size_kb = 0.0;    // last size sample
    double cost_ram_hours = 0.0;

    std::vector<double> size_samples_kb;
    std::vector<double> time_samples_s;

    std::size_t metrics_window = 20;

    bool aborted = false;
    std::size_t abort_index = 0;
    std::string abort_reason;

    std::size_t instances() const { return log.size(); }
};

struct EvalOptions {
    std::size_t metrics_window = 20;
    std::size_t size_sample_every = 100;
    /// Surviving feature positions used when the stream's dimension
    /// shrinks; prefix truncation when absent.
    std::optional<std::vector<std::size_t>> feature_keep_on_shrink;
};

/// Stage hooks, mainly for protocol tests.
struct RunHooks {
    std::function<void(std::size_t)> on_test;
    std::function<void(std::size_t)> on_train;
};

/// Test-then-train loop: each instance is scaled (update then transform),
/// predicted, scored, and only then learned -- through the SIS engine
/// when a SIS config is given, else through the learner directly. Label
/// names resolve prediction ids for the report. A mid-run data error
/// stops the loop and returns the partial report with `aborted` set.
PrequentialReport prequential_run(std::span<const Instance> stream, Classifier& learner,
                                  const std::optional<SisConfig>& sis,
                                  const std::vector<std::string>& label_names = {},
                                  const EvalOptions& opts = {},
                                  const RunHooks* hooks = nullptr);

// Report files: delimiter-separated text, one-line header, tab delimiter.
// Doubles are written in shortest round-trip form.
void write_summary(const std::string& path, const std::string& learner,
                   const PrequentialReport& report);
void write_instance_log(const std::string& path, const PrequentialReport& report);
void write_windowed_series(const std::string& path, const PrequentialReport& report);

struct SummaryRow {
    std::string learner;
    std::size_t instances = 0;
    double accuracy_pct = 0.0;
    double kappa_pct = 0.0;
    double time_s = 0.0;
    double size_kb = 0.0;
    double cost_ram_hours = 0.0;
    std::string status;  // "ok" or the abort reason
};

SummaryRow read_summary(const std::string& path);
std::vector<PredictionRecord> read_instance_log(const std::string& path,
                                                std::vector<std::string>* label_names = nullptr);
std::vector<double> read_windowed_series(const std::string& path);

/// CPU time of the calling process, in seconds.
double process_cpu_seconds();

}  // namespace sistream
