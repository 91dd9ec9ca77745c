#include "policyeval/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "policyeval/errors.hpp"
#include "policyeval/report.hpp"

namespace policyeval {

namespace {

void require_paired(const PairedSeries& s, std::size_t min_len, const char* op) {
    if (s.x.size() != s.y.size())
        raise(ErrorCode::LengthMismatch,
              std::string(op) + ": series lengths differ (" + std::to_string(s.x.size()) +
                  " vs " + std::to_string(s.y.size()) + ")");
    if (s.x.size() < min_len)
        raise(ErrorCode::EmptyResultSet,
              std::string(op) + ": need at least " + std::to_string(min_len) + " pairs, got " +
                  std::to_string(s.x.size()));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
            raise(ErrorCode::ValidationError,
                  std::string(op) + ": non-finite value at index " + std::to_string(i));
    }
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pearson_value(const std::vector<double>& x, const std::vector<double>& y,
                     const char* op) {
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        raise(ErrorCode::DegenerateVariance, std::string(op) + ": a series is constant");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace

const char* verdict_name(Verdict v) {
    return v == Verdict::Accept ? "Accept" : "Reject";
}

Verdict binarize(double score, double threshold) {
    if (!std::isfinite(score))
        raise(ErrorCode::ValidationError, "binarize: non-finite score");
    return score >= threshold ? Verdict::Accept : Verdict::Reject;
}

// ============================================================
// ConfusionMatrix
// ============================================================

long long ConfusionMatrix::total() const {
    long long t = 0;
    for (const auto& row : counts)
        for (long long c : row) t += c;
    return t;
}

ConfusionMatrix ConfusionMatrix::transposed() const {
    ConfusionMatrix out;
    out.categories = categories;
    const std::size_t n = counts.size();
    out.counts.assign(n, std::vector<long long>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.counts[j][i] = counts[i][j];
    return out;
}

ConfusionMatrix ConfusionMatrix::from_pairs(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
    if (a.size() != b.size())
        raise(ErrorCode::LengthMismatch, "confusion matrix: label sequences differ in length");
    if (a.empty())
        raise(ErrorCode::EmptyResultSet, "confusion matrix: no labels");
    std::map<std::string, std::size_t> index;
    for (const auto& v : a) index.emplace(v, 0);
    for (const auto& v : b) index.emplace(v, 0);
    ConfusionMatrix m;
    for (auto& [label, idx] : index) {
        idx = m.categories.size();
        m.categories.push_back(label);
    }
    m.counts.assign(m.categories.size(), std::vector<long long>(m.categories.size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        m.counts[index[a[i]]][index[b[i]]] += 1;
    return m;
}

// ============================================================
// Chance-corrected agreement
// ============================================================

AgreementResult cohen_kappa(const ConfusionMatrix& m) {
    const std::size_t k = m.counts.size();
    if (k == 0)
        raise(ErrorCode::EmptyResultSet, "cohen_kappa: empty matrix");
    for (const auto& row : m.counts) {
        if (row.size() != k)
            raise(ErrorCode::ValidationError, "cohen_kappa: matrix is not square");
        for (long long c : row)
            if (c < 0) raise(ErrorCode::ValidationError, "cohen_kappa: negative count");
    }
    const double total = static_cast<double>(m.total());
    if (total <= 0)
        raise(ErrorCode::EmptyResultSet, "cohen_kappa: zero total count");

    double trace = 0.0;
    std::vector<double> row_sum(k, 0.0), col_sum(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        trace += static_cast<double>(m.counts[i][i]);
        for (std::size_t j = 0; j < k; ++j) {
            row_sum[i] += static_cast<double>(m.counts[i][j]);
            col_sum[j] += static_cast<double>(m.counts[i][j]);
        }
    }
    const double p_o = trace / total;
    double p_e = 0.0;
    for (std::size_t i = 0; i < k; ++i) p_e += row_sum[i] * col_sum[i];
    p_e /= total * total;

    if (p_e >= 1.0)
        raise(ErrorCode::DegenerateMarginals,
              "cohen_kappa: both raters use a single category; kappa undefined");

    AgreementResult r;
    r.statistic = "cohen_kappa";
    r.value = (p_o - p_e) / (1.0 - p_e);
    r.n = static_cast<std::size_t>(total);
    r.notes = "P_o=" + format_fixed(p_o, 6) + " P_e=" + format_fixed(p_e, 6);
    return r;
}

AgreementResult krippendorff_alpha(const RatingsTable& t) {
    // index the observed labels
    std::map<std::string, std::size_t> index;
    for (const auto& unit : t.cells)
        for (const auto& cell : unit)
            if (cell) index.emplace(*cell, 0);
    std::size_t next = 0;
    for (auto& [label, idx] : index) idx = next++;
    const std::size_t k = index.size();

    // coincidence matrix: each ordered pair within a unit of m pairable
    // values contributes weight 1/(m-1)
    std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
    double n_pairable = 0.0;
    for (const auto& unit : t.cells) {
        std::vector<std::size_t> vals;
        for (const auto& cell : unit)
            if (cell) vals.push_back(index[*cell]);
        const std::size_t m = vals.size();
        if (m < 2) continue;
        n_pairable += static_cast<double>(m);
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (i != j) o[vals[i]][vals[j]] += w;
    }
    if (n_pairable < 2.0)
        raise(ErrorCode::NoPairableValues,
              "krippendorff_alpha: no unit has two or more ratings");

    std::vector<double> n_c(k, 0.0);
    double d_o = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t c2 = 0; c2 < k; ++c2) {
            n_c[c] += o[c][c2];
            if (c != c2) d_o += o[c][c2];
        }
    }
    d_o /= n_pairable;

    AgreementResult r;
    r.statistic = "krippendorff_alpha";
    r.n = static_cast<std::size_t>(n_pairable);
    if (d_o == 0.0) {
        r.value = 1.0;  // exact on perfect agreement, even with one category
        r.notes = "D_o=0";
        return r;
    }
    double d_e = 0.0;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t c2 = 0; c2 < k; ++c2)
            if (c != c2) d_e += n_c[c] * n_c[c2];
    d_e /= n_pairable * (n_pairable - 1.0);
    r.value = 1.0 - d_o / d_e;
    r.notes = "D_o=" + format_fixed(d_o, 6) + " D_e=" + format_fixed(d_e, 6);
    return r;
}

// ============================================================
// Correlations
// ============================================================

AgreementResult pearson(const PairedSeries& s) {
    require_paired(s, 2, "pearson");
    AgreementResult r;
    r.statistic = "pearson_r";
    r.value = pearson_value(s.x, s.y, "pearson");
    r.n = s.x.size();
    return r;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the average of ranks i+1..j+1
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = avg;
        i = j + 1;
    }
    return ranks;
}

AgreementResult spearman(const PairedSeries& s) {
    require_paired(s, 3, "spearman");
    const std::vector<double> rx = average_ranks(s.x);
    const std::vector<double> ry = average_ranks(s.y);
    AgreementResult r;
    r.statistic = "spearman_rho";
    r.value = pearson_value(rx, ry, "spearman");
    r.n = s.x.size();
    return r;
}

AgreementResult kendall_tau_b(const PairedSeries& s) {
    require_paired(s, 3, "kendall_tau_b");
    const std::size_t n = s.x.size();
    long long concordant = 0, discordant = 0;
    long long ties_x = 0, ties_y = 0;  // pairs tied in x only / y only (and both)
    long long ties_both = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = s.x[i] - s.x[j];
            const double dy = s.y[i] - s.y[j];
            if (dx == 0.0 && dy == 0.0) {
                ++ties_both;
            } else if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double n1 = static_cast<double>(ties_x + ties_both);
    const double n2 = static_cast<double>(ties_y + ties_both);
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (denom == 0.0)
        raise(ErrorCode::DegenerateVariance, "kendall_tau_b: a series is fully tied");
    AgreementResult r;
    r.statistic = "kendall_tau_b";
    r.value = std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
    r.n = n;
    r.notes = "C=" + std::to_string(concordant) + " D=" + std::to_string(discordant);
    return r;
}

AgreementResult mae(const PairedSeries& s) {
    require_paired(s, 1, "mae");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) acc += std::fabs(s.x[i] - s.y[i]);
    AgreementResult r;
    r.statistic = "mae";
    r.value = acc / static_cast<double>(s.x.size());
    r.n = s.x.size();
    return r;
}

double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2)
        raise(ErrorCode::EmptyResultSet, "sample_std: need at least 2 values, got " +
                                             std::to_string(xs.size()));
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double v : xs) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace policyeval
