#ifndef XTRAP_RECORDS_HPP
#define XTRAP_RECORDS_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace xtrap {

enum class RunStatus { Running, Converged, BudgetExhausted, Diverged };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

// One method's trace over a run: the fixed-point residual norm after every
// G-evaluation (grid-search probes included), the lambda selected at each
// selection event (tagged with the evaluation count at which it happened),
// and the terminal status.
struct RunRecord {
    std::string method;
    std::vector<double> residuals; // one entry per G-evaluation
    std::vector<std::pair<std::size_t, double>> selected_lambdas;
    double wall_ms = 0.0;
    RunStatus status = RunStatus::Running;

    std::size_t g_eval_count() const { return residuals.size(); }
};

bool same_payload(const RunRecord& a, const RunRecord& b); // ignores wall_ms

} // namespace xtrap

#endif
