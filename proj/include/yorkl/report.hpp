#ifndef YORKL_REPORT_HPP
#define YORKL_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace yorkl {

/// Two independent evaluations of the same quantity. `rhs` is the reference;
/// passed <=> abs_diff <= tolerance || rel_diff <= tolerance.
struct CrossCheckReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_diff = 0.0;
    double rel_diff = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string context;
};

inline CrossCheckReport make_report(std::string context, double lhs, double rhs, double tolerance)
{
    CrossCheckReport r;
    r.context = std::move(context);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tolerance;
    r.abs_diff = std::abs(lhs - rhs);
    if (rhs != 0.0)
        r.rel_diff = r.abs_diff / std::abs(rhs);
    else
        r.rel_diff = r.abs_diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (std::isnan(r.abs_diff))
        r.rel_diff = r.abs_diff;
    r.passed = r.abs_diff <= tolerance || r.rel_diff <= tolerance;
    return r;
}

/// Pass/fail report for a bare predicate (an inequality, a monotonicity
/// claim). lhs/rhs carry the two sides; tolerance is zero.
inline CrossCheckReport make_predicate_report(std::string context, double lhs, double rhs, bool holds)
{
    CrossCheckReport r;
    r.context = std::move(context);
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_diff = std::abs(lhs - rhs);
    r.rel_diff = rhs != 0.0 ? r.abs_diff / std::abs(rhs) : r.abs_diff;
    r.tolerance = 0.0;
    r.passed = holds;
    return r;
}

struct CheckSuite {
    std::string name;
    std::vector<CrossCheckReport> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
    void add(CrossCheckReport r) { checks.push_back(std::move(r)); }
    void append(const CheckSuite& other)
    {
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    }
};

} // namespace yorkl

#endif // YORKL_REPORT_HPP
