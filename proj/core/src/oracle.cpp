#include "phcs/oracle.hpp"

#include <sstream>

#include "phcs/error.hpp"
#include "phcs/format.hpp"
#include "phcs/metrics.hpp"

namespace phcs::oracle {

std::string describe(const IndexSet& set) {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < set.size(); ++i) out << (i ? "," : "") << set[i];
    out << '}';
    return out.str();
}

IndexSet brute_bh(const PVector& p, double alpha_max) {
    const std::size_t m = p.values.size();
    std::size_t k_star = 0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double cutoff = alpha_max * static_cast<double>(k) / static_cast<double>(m);
        std::size_t count = 0;
        for (double v : p.values)
            if (v <= cutoff) ++count;
        if (count >= k) k_star = k;
    }
    IndexSet out;
    if (k_star == 0) return out;
    const double cutoff = alpha_max * static_cast<double>(k_star) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j)
        if (p.values[j] <= cutoff) out.push_back(j);
    return out;
}

BruteEbh brute_ebh(const EVector& e, double alpha) {
    const std::size_t m = e.values.size();
    std::size_t k_star = 0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double threshold = static_cast<double>(m) / (alpha * static_cast<double>(k));
        std::size_t count = 0;
        for (double v : e.values)
            if (v >= threshold) ++count;
        if (count >= k) k_star = k;
    }

    BruteEbh out;
    if (k_star > 0) {
        const double threshold = static_cast<double>(m) / (alpha * static_cast<double>(k_star));
        for (std::size_t j = 0; j < m; ++j)
            if (e.values[j] >= threshold) out.members.push_back(j);
    }
    if (!out.members.empty()) {
        const double threshold = static_cast<double>(m) / (alpha * static_cast<double>(out.members.size()));
        std::size_t cursor = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const bool in_set = cursor < out.members.size() && out.members[cursor] == j;
            if (in_set) ++cursor;
            if (in_set != (e.values[j] >= threshold)) out.self_consistent = false;
        }
    }
    return out;
}

double exact_mean_oracle_e(std::span<const double> scores) {
    if (scores.size() < 2) throw DataError("need at least one calibration score and one test score");
    double total = 0.0;
    for (std::size_t role = 0; role < scores.size(); ++role) {
        std::vector<double> cal;
        cal.reserve(scores.size() - 1);
        for (std::size_t i = 0; i < scores.size(); ++i)
            if (i != role) cal.push_back(scores[i]);
        const EValue e = oracle_e(CalibrationScores(std::move(cal)), scores[role]);
        if (e.degenerate) throw DataError("all-zero score multiset: oracle mean undefined");
        total += e.value;
    }
    return total / static_cast<double>(scores.size());
}

OracleReport check_level_uniform(const EVector& e_oracle, const EVector& e, const std::vector<bool>& nulls,
                                 std::span<const double> alpha_grid) {
    OracleReport report;
    if (e_oracle.size() != e.size() || nulls.size() != e.size())
        throw DataError("oracle e-values, e-values and null flags must have equal length");
    double bound = 0.0;
    for (double v : e_oracle.values) bound += v;
    bound /= static_cast<double>(e.size());

    std::ostringstream inst;
    inst << "m=" << e.size() << " levels=" << alpha_grid.size();
    report.instance = inst.str();
    report.oracle_result = "bound=" + format_number(bound);

    double worst = 0.0;
    for (double alpha : alpha_grid) {
        const auto sel = ebh_select(e, alpha);
        const double ratio = fdp(sel.members, nulls) / alpha;
        worst = std::max(worst, ratio);
        if (ratio > bound && report.agree) {
            report.agree = false;
            report.detail = "alpha=" + format_number(alpha) + " FDP/alpha=" + format_number(ratio) +
                            " exceeds " + format_number(bound);
        }
    }
    report.main_result = "max FDP/alpha=" + format_number(worst);
    return report;
}

OracleReport compare_ebh(const EVector& e, double alpha) {
    OracleReport report;
    report.instance = "e-BH m=" + std::to_string(e.size()) + " alpha=" + format_number(alpha);
    const auto main = ebh_select(e, alpha);
    const auto ref = brute_ebh(e, alpha);
    report.main_result = describe(main.members);
    report.oracle_result = describe(ref.members);
    report.agree = main.members == ref.members && ref.self_consistent;
    if (!ref.self_consistent) report.detail = "brute-force set fails the self-consistency check";
    else if (!report.agree) report.detail = "selected sets differ";
    return report;
}

OracleReport compare_bh(const PVector& p, double alpha_max) {
    OracleReport report;
    report.instance = "BH m=" + std::to_string(p.size()) + " alpha=" + format_number(alpha_max);
    const auto main = bh_select(p, alpha_max);
    const auto ref = brute_bh(p, alpha_max);
    report.main_result = describe(main.members);
    report.oracle_result = describe(ref);
    report.agree = main.members == ref;
    if (!report.agree) report.detail = "selected sets differ";
    return report;
}

} // namespace phcs::oracle
