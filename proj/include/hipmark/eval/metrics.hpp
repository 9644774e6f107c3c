#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hipmark/sample.hpp"

namespace hipmark::eval {

inline constexpr std::array<double, 3> kSdrThresholdsMm{0.5, 1.0, 1.5};

/// Euclidean distance per landmark, in mm. Throws ContractError on count mismatch.
std::vector<double> radial_errors_mm(std::span<const Point> pred, std::span<const Point> gt, double spacing_mm);

/// Mean radial error over the landmarks, in mm.
double mre(std::span<const Point> pred, std::span<const Point> gt, double spacing_mm);

/// Percentage of distances d <= t for each threshold t (boundary counts as success).
/// Throws ContractError on an empty list.
std::vector<double> sdr(std::span<const double> distances_mm,
                        std::span<const double> thresholds_mm = kSdrThresholdsMm);

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample SD (n - 1); 0 for a single value
};
MeanSd mean_sd(std::span<const double> values);

struct SamplePrediction {
    std::vector<Point> pred;
    std::vector<Point> gt;
    double spacing_mm = 0.1;
    int label = 0;
    std::optional<double> probability;  // abnormal probability; absent without a class head
};

struct FoldMetrics {
    int fold = 0;
    MeanSd mre_mm;                    // across images of the fold
    std::array<double, 3> sdr{};      // over all landmark distances of the fold
    std::optional<double> accuracy;   // threshold 0.5 on the abnormal probability
    std::size_t n = 0;
};

struct AggregateMetrics {
    MeanSd mre_mm;                    // of the per-fold means
    std::array<MeanSd, 3> sdr{};
    std::optional<MeanSd> accuracy;
    std::size_t n = 0;
};

struct MetricsReport {
    std::string variant;
    std::vector<FoldMetrics> folds;
    AggregateMetrics aggregate;
};

FoldMetrics summarize_fold(std::span<const SamplePrediction> predictions, int fold);
AggregateMetrics aggregate_folds(std::span<const FoldMetrics> folds);
MetricsReport make_report(std::string variant, std::vector<FoldMetrics> folds);

inline constexpr const char* kMetricsCsvHeader = "variant,fold,mre_mm,mre_sd,sdr05,sdr10,sdr15,acc,n";

/// One row per fold plus a final `mean` row (fold SDs in the sd column).
/// The acc field is empty when the variant has no class head.
std::string metrics_csv_rows(const MetricsReport& report);
void write_metrics_csv(const std::string& path, std::span<const MetricsReport> reports);

}  // namespace hipmark::eval
