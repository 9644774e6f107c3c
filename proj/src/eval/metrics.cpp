#include "hipmark/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "hipmark/error.hpp"

namespace hipmark::eval {

std::vector<double> radial_errors_mm(std::span<const Point> pred, std::span<const Point> gt, double spacing_mm) {
    if (pred.size() != gt.size()) {
        throw ContractError(fmt::format("radial errors: {} predicted vs {} ground-truth points", pred.size(), gt.size()));
    }
    std::vector<double> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        out[i] = std::hypot(pred[i].x - gt[i].x, pred[i].y - gt[i].y) * spacing_mm;
    }
    return out;
}

double mre(std::span<const Point> pred, std::span<const Point> gt, double spacing_mm) {
    const auto d = radial_errors_mm(pred, gt, spacing_mm);
    if (d.empty()) throw ContractError("mre: no landmarks");
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

std::vector<double> sdr(std::span<const double> distances_mm, std::span<const double> thresholds_mm) {
    if (distances_mm.empty()) throw ContractError("sdr: empty distance list");
    std::vector<double> out;
    out.reserve(thresholds_mm.size());
    for (double t : thresholds_mm) {
        std::size_t hits = 0;
        for (double d : distances_mm) hits += d <= t ? 1 : 0;
        out.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(distances_mm.size()));
    }
    return out;
}

MeanSd mean_sd(std::span<const double> values) {
    if (values.empty()) throw ContractError("mean_sd: empty list");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

FoldMetrics summarize_fold(std::span<const SamplePrediction> predictions, int fold) {
    if (predictions.empty()) throw ContractError("summarize_fold: no predictions");
    FoldMetrics m;
    m.fold = fold;
    m.n = predictions.size();
    std::vector<double> per_image, all_distances;
    std::size_t correct = 0, with_probability = 0;
    for (const auto& p : predictions) {
        const auto d = radial_errors_mm(p.pred, p.gt, p.spacing_mm);
        per_image.push_back(std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size()));
        all_distances.insert(all_distances.end(), d.begin(), d.end());
        if (p.probability) {
            ++with_probability;
            const int predicted = *p.probability >= 0.5 ? 1 : 0;
            correct += predicted == p.label ? 1 : 0;
        }
    }
    if (with_probability != 0 && with_probability != predictions.size()) {
        throw ContractError("summarize_fold: class probabilities present for only some samples");
    }
    m.mre_mm = mean_sd(per_image);
    const auto rates = sdr(all_distances);
    std::copy(rates.begin(), rates.end(), m.sdr.begin());
    if (with_probability) m.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
    return m;
}

AggregateMetrics aggregate_folds(std::span<const FoldMetrics> folds) {
    if (folds.empty()) throw ContractError("aggregate_folds: no folds");
    AggregateMetrics a;
    std::vector<double> values;
    auto collect = [&](auto&& get) {
        values.clear();
        for (const auto& f : folds) values.push_back(get(f));
        return mean_sd(values);
    };
    a.mre_mm = collect([](const FoldMetrics& f) { return f.mre_mm.mean; });
    for (std::size_t t = 0; t < a.sdr.size(); ++t) {
        a.sdr[t] = collect([t](const FoldMetrics& f) { return f.sdr[t]; });
    }
    if (folds.front().accuracy) {
        a.accuracy = collect([](const FoldMetrics& f) { return f.accuracy.value_or(0.0); });
    }
    for (const auto& f : folds) a.n += f.n;
    return a;
}

MetricsReport make_report(std::string variant, std::vector<FoldMetrics> folds) {
    MetricsReport r;
    r.variant = std::move(variant);
    r.aggregate = aggregate_folds(folds);
    r.folds = std::move(folds);
    return r;
}

std::string metrics_csv_rows(const MetricsReport& report) {
    std::ostringstream out;
    for (const auto& f : report.folds) {
        out << fmt::format("{},{},{:.6f},{:.6f},{:.4f},{:.4f},{:.4f},{},{}\n", report.variant, f.fold, f.mre_mm.mean,
                           f.mre_mm.sd, f.sdr[0], f.sdr[1], f.sdr[2],
                           f.accuracy ? fmt::format("{:.4f}", *f.accuracy) : std::string(), f.n);
    }
    const auto& a = report.aggregate;
    out << fmt::format("{},mean,{:.6f},{:.6f},{:.4f},{:.4f},{:.4f},{},{}\n", report.variant, a.mre_mm.mean,
                       a.mre_mm.sd, a.sdr[0].mean, a.sdr[1].mean, a.sdr[2].mean,
                       a.accuracy ? fmt::format("{:.4f}", a.accuracy->mean) : std::string(), a.n);
    return out.str();
}

void write_metrics_csv(const std::string& path, std::span<const MetricsReport> reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << kMetricsCsvHeader << '\n';
    for (const auto& r : reports) out << metrics_csv_rows(r);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace hipmark::eval
