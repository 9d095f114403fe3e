#include "krossfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "krossfuse/types.hpp"

namespace krossfuse {
namespace {

struct Contingency {
    std::vector<std::vector<long>> table;  // [label in a][label in b]
    std::vector<long> row_sums;
    std::vector<long> col_sums;
    long n = 0;
};

std::vector<int> compact_labels(std::span<const int> labels, std::size_t& k) {
    std::map<int, int> ids;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    k = ids.size();
    return out;
}

Contingency contingency(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("clustering metric: length mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw InvalidArgument("clustering metric: empty assignments");
    std::size_t ka = 0, kb = 0;
    const auto ca = compact_labels(a, ka);
    const auto cb = compact_labels(b, kb);
    Contingency c;
    c.table.assign(ka, std::vector<long>(kb, 0));
    c.row_sums.assign(ka, 0);
    c.col_sums.assign(kb, 0);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        ++c.table[ca[i]][cb[i]];
        ++c.row_sums[ca[i]];
        ++c.col_sums[cb[i]];
    }
    c.n = static_cast<long>(a.size());
    return c;
}

double entropy(const std::vector<long>& sums, long n) {
    double h = 0.0;
    for (long s : sums) {
        if (s > 0) {
            const double p = static_cast<double>(s) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    }
    return h;
}

double mutual_information(const Contingency& c) {
    const double n = static_cast<double>(c.n);
    double mi = 0.0;
    for (std::size_t i = 0; i < c.row_sums.size(); ++i) {
        for (std::size_t j = 0; j < c.col_sums.size(); ++j) {
            const long nij = c.table[i][j];
            if (nij == 0) continue;
            const double v = static_cast<double>(nij);
            mi += v / n * std::log(n * v / (static_cast<double>(c.row_sums[i]) * static_cast<double>(c.col_sums[j])));
        }
    }
    return std::max(mi, 0.0);
}

// E[MI] under the permutation (hypergeometric) model.
double expected_mutual_information(const Contingency& c) {
    const long n = c.n;
    const double dn = static_cast<double>(n);
    double emi = 0.0;
    for (long ai : c.row_sums) {
        for (long bj : c.col_sums) {
            const long lo = std::max(1L, ai + bj - n);
            const long hi = std::min(ai, bj);
            for (long nij = lo; nij <= hi; ++nij) {
                const double v = static_cast<double>(nij);
                const double term = v / dn * std::log(dn * v / (static_cast<double>(ai) * static_cast<double>(bj)));
                const double log_p = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) + std::lgamma(n - ai + 1.0) +
                                     std::lgamma(n - bj + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(v + 1.0) -
                                     std::lgamma(ai - v + 1.0) - std::lgamma(bj - v + 1.0) -
                                     std::lgamma(n - ai - bj + v + 1.0);
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

}  // namespace

double nmi(std::span<const int> a, std::span<const int> b) {
    const Contingency c = contingency(a, b);
    const double ha = entropy(c.row_sums, c.n);
    const double hb = entropy(c.col_sums, c.n);
    if (ha == 0.0 && hb == 0.0) return 1.0;  // two trivial partitions agree
    const double denom = 0.5 * (ha + hb);
    return std::clamp(mutual_information(c) / denom, 0.0, 1.0);
}

double ami(std::span<const int> a, std::span<const int> b) {
    const Contingency c = contingency(a, b);
    // Identical trivial partitions (one cluster each, or all singletons).
    if ((c.row_sums.size() == 1 && c.col_sums.size() == 1) ||
        (c.row_sums.size() == static_cast<std::size_t>(c.n) && c.col_sums.size() == static_cast<std::size_t>(c.n))) {
        return 1.0;
    }
    const double mi = mutual_information(c);
    const double emi = expected_mutual_information(c);
    const double mean_h = 0.5 * (entropy(c.row_sums, c.n) + entropy(c.col_sums, c.n));
    double denom = mean_h - emi;
    const double eps = std::numeric_limits<double>::epsilon();
    if (std::abs(denom) < eps) denom = denom < 0 ? -eps : eps;
    return (mi - emi) / denom;
}

double ari(std::span<const int> a, std::span<const int> b) {
    const Contingency c = contingency(a, b);
    // Pair counts are integers; keep the ratio exact until the final division.
    __extension__ typedef __int128 wide;
    wide sum_ij = 0, sum_a = 0, sum_b = 0;
    for (const auto& row : c.table)
        for (long v : row) sum_ij += static_cast<wide>(v) * (v - 1) / 2;
    for (long v : c.row_sums) sum_a += static_cast<wide>(v) * (v - 1) / 2;
    for (long v : c.col_sums) sum_b += static_cast<wide>(v) * (v - 1) / 2;
    const wide total = static_cast<wide>(c.n) * (c.n - 1) / 2;
    if (total == 0) return 1.0;
    const wide num = 2 * (sum_ij * total - sum_a * sum_b);
    const wide den = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
    if (den == 0) return 1.0;  // both partitions trivial in the same way
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

ClusterReport score_clustering(Assignments predicted, std::span<const int> truth) {
    ClusterReport r;
    r.nmi = nmi(predicted, truth);
    r.ami = ami(predicted, truth);
    r.ari = ari(predicted, truth);
    r.assignments = std::move(predicted);
    return r;
}

}  // namespace krossfuse
