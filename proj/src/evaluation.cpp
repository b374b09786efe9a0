#include "sistream/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <deque>
#include <fstream>
#include <sstream>

#include "sistream/scaling.hpp"

namespace sistream {

void ConfusionMatrix::grow(std::size_t n) {
    if (n <= counts_.size()) return;
    for (auto& row : counts_) row.resize(n, 0);
    counts_.resize(n, std::vector<std::uint64_t>(n, 0));
}

void ConfusionMatrix::add(int truth, int predicted) {
    if (truth < 0 || predicted < 0)
        throw std::invalid_argument("ConfusionMatrix: negative class id");
    grow(static_cast<std::size_t>(std::max(truth, predicted)) + 1);
    ++counts_[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
    ++total_;
}

std::uint64_t ConfusionMatrix::at(std::size_t truth, std::size_t predicted) const {
    return counts_.at(truth).at(predicted);
}

std::uint64_t ConfusionMatrix::correct() const {
    std::uint64_t sum = 0;
    for (std::size_t c = 0; c < counts_.size(); ++c) sum += counts_[c][c];
    return sum;
}

double ConfusionMatrix::accuracy() const {
    if (total_ == 0) throw std::logic_error("ConfusionMatrix: empty");
    return static_cast<double>(correct()) / static_cast<double>(total_);
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t sum = 0;
    for (std::uint64_t v : counts_.at(truth)) sum += v;
    return sum;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
    std::uint64_t sum = 0;
    for (const auto& row : counts_) sum += row.at(predicted);
    return sum;
}

double kappa(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::logic_error("kappa: empty confusion matrix");
    // Integer-product form of (rho_o - rho_ran) / (1 - rho_ran); exact for
    // whole counts.
    const double n = static_cast<double>(cm.total());
    double marginal = 0.0;
    for (std::size_t c = 0; c < cm.num_classes(); ++c)
        marginal += static_cast<double>(cm.row_sum(c)) * static_cast<double>(cm.col_sum(c));
    const double numer = n * static_cast<double>(cm.correct()) - marginal;
    const double denom = n * n - marginal;
    if (denom == 0.0) return 1.0;
    return numer / denom;
}

std::vector<double> windowed_accuracy(std::span<const PredictionRecord> log,
                                      std::size_t window) {
    if (window == 0) throw std::invalid_argument("windowed_accuracy: window must be >= 1");
    std::vector<double> out;
    out.reserve(log.size());
    std::size_t in_window_correct = 0;
    for (std::size_t t = 0; t < log.size(); ++t) {
        in_window_correct += log[t].correct;
        if (t >= window) in_window_correct -= log[t - window].correct;
        const std::size_t covered = std::min(t + 1, window);
        out.push_back(100.0 * static_cast<double>(in_window_correct) /
                      static_cast<double>(covered));
    }
    return out;
}

double ram_hour_cost(std::span<const double> size_kb, std::span<const double> elapsed_seconds) {
    if (size_kb.size() != elapsed_seconds.size())
        throw std::invalid_argument("ram_hour_cost: misaligned series");
    double cost = 0.0;
    for (std::size_t i = 1; i < size_kb.size(); ++i) {
        const double dt = elapsed_seconds[i] - elapsed_seconds[i - 1];
        if (dt < 0.0) throw std::invalid_argument("ram_hour_cost: time must be non-decreasing");
        cost += 0.5 * (size_kb[i] + size_kb[i - 1]) * dt / 3600.0;
    }
    return cost;
}

double process_cpu_seconds() {
#if defined(CLOCK_PROCESS_CPUTIME_ID)
    timespec ts{};
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
#else
    return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
#endif
}

PrequentialReport prequential_run(std::span<const Instance> stream, Classifier& learner,
                                  const std::optional<SisConfig>& sis,
                                  const std::vector<std::string>& label_names,
                                  const EvalOptions& opts, const RunHooks* hooks) {
    PrequentialReport report;
    report.metrics_window = opts.metrics_window;
    report.label_names = label_names;

    RunningScaler scaler;
    std::optional<SisEngine> engine;
    if (sis.has_value()) engine.emplace(*sis);

    double learner_seconds = 0.0;
    std::size_t correct_in_window = 0;
    std::deque<bool> window;

    auto sample_size = [&]() {
        std::size_t bytes = learner.size_bytes();
        if (engine) bytes += engine->size_bytes();
        report.size_samples_kb.push_back(static_cast<double>(bytes) / 1024.0);
        report.time_samples_s.push_back(learner_seconds);
    };
    sample_size();

    for (std::size_t idx = 0; idx < stream.size(); ++idx) {
        const Instance& raw = stream[idx];
        try {
            if (!raw.labeled())
                throw StreamError("unlabeled instance at position " + std::to_string(idx));

            // Dimension shrink: restrict the scaler to the surviving
            // coordinates and let SIS rebuild the learner from the resized
            // buffer. The prediction below comes from a freshly reset
            // learner and falls back to the default class.
            if (!scaler.empty() && raw.dim() != scaler.dimension()) {
                if (!engine)
                    throw StreamError("dimension changed at position " + std::to_string(idx) +
                                      " (only SIS runs support feature drift)");
                if (raw.dim() > scaler.dimension())
                    throw StreamError("dimension grew at position " + std::to_string(idx) +
                                      " (feature re-appearance unsupported)");
                std::vector<std::size_t> keep;
                if (opts.feature_keep_on_shrink.has_value() &&
                    opts.feature_keep_on_shrink->size() == raw.dim()) {
                    keep = *opts.feature_keep_on_shrink;
                } else {
                    keep.resize(raw.dim());
                    for (std::size_t j = 0; j < raw.dim(); ++j) keep[j] = j;
                }
                scaler.restrict_to(std::span<const std::size_t>(keep));
                engine->set_pending_feature_keep(std::move(keep));
                learner.reset();
            }

            scaler.update(raw);
            const Instance scaled = scaler.transform(raw);

            if (hooks && hooks->on_test) hooks->on_test(raw.time_index);
            double t0 = process_cpu_seconds();
            const int predicted = learner.predict_one(scaled);
            learner_seconds += process_cpu_seconds() - t0;

            const int truth = *raw.label;
            PredictionRecord rec{raw.time_index, truth, predicted, predicted == truth};
            report.confusion.add(truth, predicted);
            window.push_back(rec.correct);
            correct_in_window += rec.correct;
            if (window.size() > opts.metrics_window) {
                correct_in_window -= window.front();
                window.pop_front();
            }
            report.windowed.push_back(100.0 * static_cast<double>(correct_in_window) /
                                      static_cast<double>(window.size()));
            report.log.push_back(rec);

            if (hooks && hooks->on_train) hooks->on_train(raw.time_index);
            t0 = process_cpu_seconds();
            if (engine) engine->train_step(learner, scaled);
            else learner.learn_one(scaled);
            learner_seconds += process_cpu_seconds() - t0;

            if ((idx + 1) % opts.size_sample_every == 0) sample_size();
        } catch (const std::exception& e) {
            report.aborted = true;
            report.abort_index = idx;
            report.abort_reason = e.what();
            break;
        }
    }

    report.learner_seconds = learner_seconds;
    sample_size();
    report.model_size_kb = report.size_samples_kb.back();
    report.cost_ram_hours = ram_hour_cost(report.size_samples_kb, report.time_samples_s);
    if (report.confusion.total() > 0) {
        report.accuracy_pct = 100.0 * report.confusion.accuracy();
        report.kappa_pct = 100.0 * kappa(report.confusion);
    }
    return report;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("report file: bad number: " + s);
    return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        std::size_t end = line.find('\t', begin);
        if (end == std::string::npos) {
            out.push_back(line.substr(begin));
            break;
        }
        out.push_back(line.substr(begin, end - begin));
        begin = end + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return in;
}

std::string label_text(const PrequentialReport& report, int id) {
    if (id >= 0 && static_cast<std::size_t>(id) < report.label_names.size())
        return report.label_names[static_cast<std::size_t>(id)];
    return std::to_string(id);
}

}  // namespace

void write_summary(const std::string& path, const std::string& learner,
                   const PrequentialReport& report) {
    auto out = open_out(path);
    out << "learner\tinstances\taccuracy_pct\tkappa_pct\ttime_s\tsize_kb\tcost_ram_hours\tstatus\n";
    out << learner << '\t' << report.instances() << '\t' << format_double(report.accuracy_pct)
        << '\t' << format_double(report.kappa_pct) << '\t'
        << format_double(report.learner_seconds) << '\t'
        << format_double(report.model_size_kb) << '\t'
        << format_double(report.cost_ram_hours) << '\t'
        << (report.aborted ? "failed: " + report.abort_reason : std::string("ok")) << '\n';
}

void write_instance_log(const std::string& path, const PrequentialReport& report) {
    auto out = open_out(path);
    out << "time_index\ttrue\tpredicted\tcorrect\n";
    for (const auto& rec : report.log)
        out << rec.time_index << '\t' << label_text(report, rec.truth) << '\t'
            << label_text(report, rec.predicted) << '\t' << (rec.correct ? 1 : 0) << '\n';
    if (report.aborted) out << "# FAILED at " << report.abort_index << ": " << report.abort_reason << '\n';
}

void write_windowed_series(const std::string& path, const PrequentialReport& report) {
    auto out = open_out(path);
    out << "time_index\twindowed_accuracy_pct\n";
    for (std::size_t t = 0; t < report.windowed.size(); ++t)
        out << report.log[t].time_index << '\t' << format_double(report.windowed[t]) << '\n';
}

SummaryRow read_summary(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("summary file empty: " + path);
    if (!std::getline(in, line)) throw std::runtime_error("summary file has no data row: " + path);
    auto f = split_tabs(line);
    if (f.size() != 8) throw std::runtime_error("summary file: expected 8 columns");
    SummaryRow row;
    row.learner = f[0];
    row.instances = static_cast<std::size_t>(std::stoull(f[1]));
    row.accuracy_pct = parse_double(f[2]);
    row.kappa_pct = parse_double(f[3]);
    row.time_s = parse_double(f[4]);
    row.size_kb = parse_double(f[5]);
    row.cost_ram_hours = parse_double(f[6]);
    row.status = f[7];
    return row;
}

std::vector<PredictionRecord> read_instance_log(const std::string& path,
                                                std::vector<std::string>* label_names) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<PredictionRecord> out;
    ClassSpace classes;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (f.size() != 4) throw std::runtime_error("instance log: expected 4 columns");
        PredictionRecord rec;
        rec.time_index = static_cast<std::size_t>(std::stoull(f[0]));
        rec.truth = classes.intern(f[1]);
        rec.predicted = classes.intern(f[2]);
        rec.correct = f[3] == "1";
        out.push_back(rec);
    }
    if (label_names) {
        label_names->clear();
        for (std::size_t i = 0; i < classes.size(); ++i)
            label_names->push_back(classes.name(static_cast<int>(i)));
    }
    return out;
}

std::vector<double> read_windowed_series(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 2) throw std::runtime_error("windowed series: expected 2 columns");
        out.push_back(parse_double(f[1]));
    }
    return out;
}

}  // namespace sistream
