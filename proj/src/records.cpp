#include "xtrap/records.hpp"

#include <stdexcept>

namespace xtrap {

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Running: return "Running";
        case RunStatus::Converged: return "Converged";
        case RunStatus::BudgetExhausted: return "BudgetExhausted";
        case RunStatus::Diverged: return "Diverged";
    }
    throw std::logic_error("unknown status");
}

RunStatus run_status_from_string(const std::string& s) {
    if (s == "Running") return RunStatus::Running;
    if (s == "Converged") return RunStatus::Converged;
    if (s == "BudgetExhausted") return RunStatus::BudgetExhausted;
    if (s == "Diverged") return RunStatus::Diverged;
    throw std::invalid_argument("unknown run status '" + s + "'");
}

bool same_payload(const RunRecord& a, const RunRecord& b) {
    return a.method == b.method && a.residuals == b.residuals && a.selected_lambdas == b.selected_lambdas &&
           a.status == b.status;
}

} // namespace xtrap
