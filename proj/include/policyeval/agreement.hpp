#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace policyeval {

// ============================================================
// Types
// ============================================================

enum class Verdict { Accept, Reject };

const char* verdict_name(Verdict v);

/// Square rater-A x rater-B count table over shared category labels.
struct ConfusionMatrix {
    std::vector<std::string> categories;
    std::vector<std::vector<long long>> counts;

    long long total() const;
    ConfusionMatrix transposed() const;

    /// Tally two equal-length label sequences into a matrix whose
    /// categories are the sorted union of observed labels.
    static ConfusionMatrix from_pairs(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b);
};

/// Units x raters grid of nominal labels; empty optional = not rated.
struct RatingsTable {
    std::vector<std::vector<std::optional<std::string>>> cells;
};

/// Two aligned real-valued series (e.g. scores from two graders).
struct PairedSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::string> labels;  // optional, empty or one per row
};

struct AgreementResult {
    std::string statistic;
    double value = 0.0;
    std::size_t n = 0;
    std::string notes;
};

// ============================================================
// Operations
// ============================================================

/// Accept iff score >= threshold.
Verdict binarize(double score, double threshold = 4.0);

/// Cohen's kappa, (P_o - P_e) / (1 - P_e). Raises DegenerateMarginals
/// when chance agreement is exactly 1 (both raters constant on the
/// same category) instead of returning NaN.
AgreementResult cohen_kappa(const ConfusionMatrix& m);

/// Krippendorff's alpha for nominal labels via the coincidence-matrix
/// formulation, including the small-sample pairable-values correction.
/// Exactly 1 when every pairable value within every unit agrees.
AgreementResult krippendorff_alpha(const RatingsTable& t);

/// Product-moment correlation.
AgreementResult pearson(const PairedSeries& s);

/// Rank correlation: average ranks for ties, then Pearson on ranks.
AgreementResult spearman(const PairedSeries& s);

/// Kendall's tau-b with tie corrections in both series.
AgreementResult kendall_tau_b(const PairedSeries& s);

/// Mean absolute difference between the paired values.
AgreementResult mae(const PairedSeries& s);

/// Standard deviation with n-1 denominator; requires >= 2 values.
double sample_std(const std::vector<double>& xs);

/// 1-based ranks where tied values share the average of their positions.
/// Exposed because scoring/bias reuse it for rank-stability reports.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace policyeval
