#include "xtrap/drivers.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace xtrap::drivers {

namespace {

constexpr double kDivergenceGuard = 1e12;

// Evaluates G, logs the residual after every evaluation and keeps the
// terminal status up to date (convergence beats divergence beats budget).
struct EvalLoop {
    const FixedPointProblem& problem;
    RunRecord& rec;
    double tol;
    std::size_t budget;

    Vector eval(const Vector& s) {
        Vector g = problem.evaluate(s);
        const double r = (g - s).norm();
        rec.residuals.push_back(r);
        if (std::isfinite(r) && r < tol)
            rec.status = RunStatus::Converged;
        else if (!std::isfinite(r) || r > kDivergenceGuard)
            rec.status = RunStatus::Diverged;
        else if (rec.residuals.size() >= budget)
            rec.status = RunStatus::BudgetExhausted;
        return g;
    }

    bool done() const { return rec.status != RunStatus::Running; }

    void note_lambda(double lam) { rec.selected_lambdas.emplace_back(rec.residuals.size(), lam); }
};

bool is_restarted(Method m) { return m == Method::SVDA || m == Method::RNLA || m == Method::RRRE || m == Method::RTSA; }
bool is_mixing(Method m) {
    return m == Method::AA || m == Method::RAA || m == Method::AtmRre || m == Method::AtmMpe || m == Method::AtmMmpe;
}

void validate(const MethodConfig& cfg) {
    if (!(cfg.mixing_beta > 0.0 && cfg.mixing_beta <= 1.0))
        throw ConfigError("mixing_beta", "must be in (0, 1]");
    if (!(cfg.tau > 1.0)) throw ConfigError("tau", "must be > 1");
    if (!(cfg.tol > 0.0)) throw ConfigError("tol", "must be positive");
    if (cfg.window && *cfg.window < 1) throw ConfigError("window", "must be >= 1");
}

Matrix sample_mmpe_matrix(Index p, Index m, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix y(p, std::min(p, m));
    for (Index j = 0; j < y.cols(); ++j)
        for (Index i = 0; i < p; ++i) y(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(y);
    Matrix q = qr.householderQ();
    return q.leftCols(y.cols());
}

} // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::SVDA: return "SVDA";
        case Method::RNLA: return "RNLA";
        case Method::RRRE: return "RRRE";
        case Method::RTSA: return "RTSA";
        case Method::AA: return "AA";
        case Method::RAA: return "RAA";
        case Method::AtmRre: return "ATM-RRE";
        case Method::AtmMpe: return "ATM-MPE";
        case Method::AtmMmpe: return "ATM-MMPE";
        case Method::StabilizedAA: return "StabilizedAA";
        case Method::PlainFixedPoint: return "PlainFixedPoint";
    }
    throw std::logic_error("unknown method");
}

Method method_from_string(const std::string& name) {
    for (Method m : {Method::SVDA, Method::RNLA, Method::RRRE, Method::RTSA, Method::AA, Method::RAA, Method::AtmRre,
                     Method::AtmMpe, Method::AtmMmpe, Method::StabilizedAA, Method::PlainFixedPoint})
        if (to_string(m) == name) return m;
    throw ConfigError("method", "unknown method id '" + name + "'");
}

Index resolved_window(const MethodConfig& cfg) {
    if (cfg.window) return *cfg.window;
    switch (cfg.method) {
        case Method::RTSA: return 3; // 2k+1 = 7 iterates per cycle
        case Method::SVDA:
        case Method::RNLA:
        case Method::RRRE: return 5; // k+2 = 7 iterates per cycle
        default: return 6;           // mixing histories hold 7 iterates
    }
}

RegularizationPolicy resolved_policy(const MethodConfig& cfg) {
    if (cfg.reg) return *cfg.reg;
    switch (cfg.method) {
        case Method::RNLA:
        case Method::RTSA: return RegularizationPolicy::grid_search(lambda::default_grid());
        case Method::RRRE:
        case Method::RAA: return RegularizationPolicy::gcv(lambda::default_grid());
        default: return RegularizationPolicy::fixed(0.0);
    }
}

// ---------------------------------------------------------------------------
// Quasi-Newton view and explicit constructions.

QuasiNewtonMatrixView::QuasiNewtonMatrixView(Matrix dS, Matrix dF, double beta, double lambda, RaaVariant variant)
    : ds_(std::move(dS)), df_(std::move(dF)), beta_(beta) {
    if (ds_.cols() != df_.cols() || (ds_.cols() > 0 && ds_.rows() != df_.rows()))
        throw std::invalid_argument("QuasiNewtonMatrixView: dS and dF must conform");
    if (ds_.cols() == 0) return;
    df_right_ = (variant == RaaVariant::Type1 && lambda > 0.0) ? linalg::svd_shift(df_, lambda) : df_;
    Matrix gram = df_right_.transpose() * df_right_;
    if (variant == RaaVariant::Type2) gram.diagonal().array() += lambda;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const Vector ev = eig.eigenvalues().cwiseAbs();
    if (ev.minCoeff() <= 0.0 || ev.maxCoeff() / ev.minCoeff() > linalg::kSingularCondition)
        throw SingularSystem("QuasiNewtonMatrixView: residual-difference Gram matrix is numerically singular");
    gram_.compute(gram);
    combo_ = ds_ + beta_ * df_right_;
}

Vector QuasiNewtonMatrixView::apply(const Vector& v) const {
    if (ds_.cols() == 0) return -beta_ * v;
    return -beta_ * v + combo_ * gram_.solve(df_right_.transpose() * v);
}

Vector apply_H_beta(const QuasiNewtonMatrixView& view, const Vector& v) { return view.apply(v); }

Matrix h_beta_closed_form(const Matrix& dS, const Matrix& dF, double beta) {
    const Index p = dF.rows();
    if (dF.cols() == 0) return Matrix(-beta * Matrix::Identity(p, p));
    Matrix gram = dF.transpose() * dF;
    return -beta * Matrix::Identity(p, p) + (dS + beta * dF) * gram.ldlt().solve(dF.transpose());
}

namespace {

// Plain Gram-Schmidt over the columns of dF (full-rank inputs expected).
std::vector<Vector> orthogonalize_columns(const Matrix& dF) {
    std::vector<Vector> fhat;
    for (Index d = 0; d < dF.cols(); ++d) {
        Vector v = dF.col(d);
        for (const Vector& u : fhat) v -= u * (u.dot(dF.col(d)) / u.squaredNorm());
        fhat.push_back(v);
    }
    return fhat;
}

} // namespace

Matrix h_beta_recursive_secant(const Matrix& dS, const Matrix& dF, double beta) {
    const Index p = dF.rows();
    Matrix h = -beta * Matrix::Identity(p, p);
    const auto fhat = orthogonalize_columns(dF);
    for (Index d = 0; d < dF.cols(); ++d) {
        const Vector& fh = fhat[static_cast<std::size_t>(d)];
        h += (dS.col(d) - h * dF.col(d)) * fh.transpose() / fh.dot(dF.col(d));
    }
    return h;
}

Matrix h_beta_recursive_projected(const Matrix& dS, const Matrix& dF, double beta) {
    const Index p = dF.rows();
    Matrix h = -beta * Matrix::Identity(p, p);
    const auto fhat = orthogonalize_columns(dF);
    Matrix q = Matrix::Zero(p, p); // running sum of survivor projectors
    for (Index d = 0; d < dF.cols(); ++d) {
        const Vector& fh = fhat[static_cast<std::size_t>(d)];
        Vector shat = dS.col(d);
        if (d > 0) shat -= h * (q * dF.col(d));
        h += (shat - h * fh) * fh.transpose() / fh.squaredNorm();
        q += fh * fh.transpose() / fh.squaredNorm();
    }
    return h;
}

StabilizedSurvivors stabilized_filter(const Matrix& dF, double tau) {
    StabilizedSurvivors out;
    for (Index d = 0; d < dF.cols(); ++d) {
        const Vector col = dF.col(d);
        Vector fhat = col;
        // (I - Q) applied as the running sum of survivor projectors.
        for (const Vector& u : out.orthogonalized) fhat -= u * (u.dot(col) / u.squaredNorm());
        const double cn = col.norm();
        if (cn > 0.0 && fhat.norm() * tau >= cn) {
            out.kept.push_back(d);
            out.orthogonalized.push_back(std::move(fhat));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mixing step (Anderson-type methods).

namespace {

shanks::ThetaCoeffs mixing_theta(const AtmState& state, const Vector& f_j, const MethodConfig& cfg, Index cols,
                                 std::optional<double>& lambda_out) {
    const long j = state.j;
    const long lo = j - cols;
    const Matrix dF = delta_matrix(state.f_history, lo, cols);

    switch (cfg.method) {
        case Method::AA:
            return shanks::solve_theta_coupled(dF, f_j, cfg.metric, 0.0);
        case Method::RAA: {
            const RegularizationPolicy policy = resolved_policy(cfg);
            double lam = 0.0;
            if (policy.is_gcv())
                lam = lambda::gcv_select(dF, f_j, policy.grid());
            else if (policy.is_fixed())
                lam = policy.fixed_lambda();
            else
                throw ConfigError("reg", "RAA supports fixed or GCV regularization");
            lambda_out = lam;
            if (lam == 0.0) return shanks::solve_theta_coupled(dF, f_j, cfg.metric, 0.0);
            // theta = (dF~^T dF~)^{-1} dF^T f with dF~ the SVD-shifted history.
            Matrix shifted = linalg::svd_shift(dF, lam);
            Matrix gram = shifted.transpose() * shifted;
            return shanks::ThetaCoeffs{gram.ldlt().solve(dF.transpose() * f_j)};
        }
        case Method::AtmRre: {
            const Matrix y = delta2_matrix(state.s_history, lo - 1, cols);
            return shanks::solve_theta_coupled(dF, f_j, MetricSpec::factor(y), 0.0);
        }
        case Method::AtmMpe: {
            const Matrix y = delta_matrix(state.s_history, lo, cols);
            return shanks::solve_theta_coupled(dF, f_j, MetricSpec::factor(y), 0.0);
        }
        case Method::AtmMmpe: {
            const Matrix y = state.mmpe_y.leftCols(std::min(cols, state.mmpe_y.cols()));
            if (y.cols() != cols) throw SingularSystem("ATM-MMPE: fixed Y has fewer columns than the window");
            return shanks::solve_theta_coupled(dF, f_j, MetricSpec::factor(y), 0.0);
        }
        default:
            throw ConfigError("method", "not a mixing method");
    }
}

} // namespace

AtmStepResult atm_step(AtmState& state, const Vector& g_value, const MethodConfig& cfg) {
    const long j = state.j;
    const Vector& s_j = state.s_history.at(j);
    Vector f_j = g_value - s_j;
    state.f_history.push(f_j);

    const Index m = resolved_window(cfg);
    // ATM-RRE needs one extra iterate for its second differences.
    const long max_cols = (cfg.method == Method::AtmRre) ? (j - 1) : j;
    Index cols = static_cast<Index>(std::min<long>(m, max_cols));

    AtmStepResult result;
    Vector theta;
    bool solved = false;
    for (int attempt = 0; attempt < 2 && cols >= 1 && !solved; ++attempt) {
        try {
            std::optional<double> lam;
            theta = mixing_theta(state, f_j, cfg, cols, lam).values;
            result.selected_lambda = lam;
            solved = true;
        } catch (const SingularSystem&) {
            --cols; // drop the oldest history column and retry once
        }
    }

    if (solved) {
        const long lo = j - cols;
        const Matrix dS = delta_matrix(state.s_history, lo, cols);
        const Matrix dF = delta_matrix(state.f_history, lo, cols);
        Vector s_bar = s_j - dS * theta;
        Vector f_bar = f_j - dF * theta;
        result.next = s_bar + cfg.mixing_beta * f_bar;
    } else {
        result.next = s_j + cfg.mixing_beta * f_j;
        result.damped_fallback = true;
    }

    state.s_history.push(result.next);
    state.j = j + 1;
    return result;
}

// ---------------------------------------------------------------------------
// Full runs.

RunRecord run_plain(const FixedPointProblem& problem, const MethodConfig& cfg) {
    validate(cfg);
    RunRecord rec;
    rec.method = to_string(Method::PlainFixedPoint);
    EvalLoop loop{problem, rec, cfg.tol, cfg.max_g_evals};
    Vector x = problem.initial_guess;
    while (!loop.done()) x = loop.eval(x);
    return rec;
}

namespace {

// Candidate extrapolation of one restarted cycle at a given lambda; the
// window holds the cycle's iterates s_0..s_{lk-1} at indices base..base+lk-1.
Vector restarted_extrapolate(const SequenceWindow& win, long base, const MethodConfig& cfg, Index k, double lam) {
    const bool tilde = cfg.use_t_tilde;
    switch (cfg.method) {
        case Method::SVDA: {
            auto [v, sigma] = shanks::solve_alpha_svd(delta_matrix(win, base, k + 1));
            (void)sigma;
            Vector w = v;
            if (cfg.svda_sum_normalize) {
                const double denom = v.sum();
                if (std::abs(denom) < 1e-14) throw DegenerateNormalization("SVDA: singular vector sums to zero");
                w = v / denom;
            }
            return iterate_slice(win, base + (tilde ? 0 : 1), k + 1) * w;
        }
        case Method::RNLA: {
            auto alpha = shanks::solve_alpha_minres(delta_matrix(win, base, k + 1), cfg.metric, lam);
            return shanks::combine_alpha(iterate_slice(win, base + (tilde ? 0 : 1), k + 1), alpha);
        }
        case Method::RRRE: {
            const Vector rhs = win.at(base + k + 1) - win.at(base + k);
            auto beta = shanks::solve_beta_rre(delta2_matrix(win, base, k), rhs, cfg.metric, lam);
            if (tilde) return shanks::combine_beta(win.at(base + k), delta_matrix(win, base, k), beta);
            return shanks::combine_beta(win.at(base + k + 1), delta_matrix(win, base + 1, k), beta);
        }
        case Method::RTSA: {
            auto alpha = shanks::solve_alpha_topological(stacked_delta(win, base, k, k + 1), cfg.metric, lam);
            return shanks::combine_alpha(iterate_slice(win, base + k, k + 1), alpha);
        }
        default:
            throw ConfigError("method", "not a restarted method");
    }
}

} // namespace

RunRecord run_restarted(const FixedPointProblem& problem, const MethodConfig& cfg) {
    validate(cfg);
    if (!is_restarted(cfg.method)) throw ConfigError("method", "run_restarted requires SVDA/RNLA/RRRE/RTSA");
    const Index k = resolved_window(cfg);
    const Index lk = (cfg.method == Method::RTSA) ? 2 * k + 1 : k + 2;
    const RegularizationPolicy policy = resolved_policy(cfg);
    if (policy.is_gcv() && cfg.method != Method::RRRE)
        throw ConfigError("reg", "GCV selection requires a regression-form method (RRRE)");

    RunRecord rec;
    rec.method = to_string(cfg.method);
    EvalLoop loop{problem, rec, cfg.tol, cfg.max_g_evals};

    Vector x = problem.initial_guess;
    std::optional<Vector> carried_g; // G(x) already evaluated during grid probing
    SequenceWindow win(problem.dim, static_cast<std::size_t>(lk));

    while (!loop.done()) {
        win.clear();
        const long base = win.last_index() + 1;
        win.push(x);
        for (Index i = 1; i < lk; ++i) {
            Vector g;
            if (carried_g) {
                g = std::move(*carried_g);
                carried_g.reset();
            } else {
                g = loop.eval(win.at(win.last_index()));
                if (loop.done()) break;
            }
            win.push(std::move(g));
        }
        if (loop.done()) break;

        // Extrapolate; any singular coefficient solve falls back to restarting
        // from the newest iterate.
        Vector next = win.at(win.last_index());
        try {
            if (cfg.method == Method::SVDA) {
                next = restarted_extrapolate(win, base, cfg, k, 0.0);
            } else if (policy.is_fixed()) {
                const double lam = policy.fixed_lambda();
                next = restarted_extrapolate(win, base, cfg, k, lam);
                loop.note_lambda(lam);
            } else if (policy.is_gcv()) {
                const double lam =
                    lambda::gcv_select(delta2_matrix(win, base, k), win.at(base + k + 1) - win.at(base + k),
                                       policy.grid());
                next = restarted_extrapolate(win, base, cfg, k, lam);
                loop.note_lambda(lam);
            } else {
                // Grid search: one probe evaluation per candidate, all counted.
                std::vector<lambda::Candidate> candidates;
                for (double lam : policy.grid()) {
                    try {
                        candidates.push_back({lam, restarted_extrapolate(win, base, cfg, k, lam)});
                    } catch (const SingularSystem&) {
                    } catch (const DegenerateNormalization&) {
                    }
                }
                if (candidates.empty()) throw SingularSystem("no usable grid candidate");
                std::vector<std::optional<Vector>> probe_g(candidates.size());
                std::optional<std::size_t> stopped_at;
                auto residual_norm_of = [&](std::size_t idx, const Vector& t) {
                    if (loop.done()) return std::numeric_limits<double>::infinity();
                    Vector g = loop.eval(t);
                    if (loop.done()) stopped_at = idx;
                    probe_g[idx] = std::move(g);
                    return rec.residuals.back();
                };
                auto selection = lambda::grid_search_select(candidates, residual_norm_of);
                if (stopped_at) {
                    // A probe itself converged (or tripped a guard); finish there.
                    x = candidates[*stopped_at].extrapolated;
                    loop.note_lambda(candidates[*stopped_at].lambda);
                    break;
                }
                next = selection.extrapolated;
                loop.note_lambda(selection.lambda);
                carried_g = probe_g[selection.candidate_index]; // reuse as the next cycle's first iterate
            }
        } catch (const SingularSystem&) {
            carried_g.reset();
        } catch (const DegenerateNormalization&) {
            carried_g.reset();
        } catch (const AllCandidatesFailed&) {
            carried_g.reset();
        }
        x = next;
    }
    return rec;
}

RunRecord run_continuous_alpha(const FixedPointProblem& problem, const MethodConfig& cfg) {
    validate(cfg);
    const Index m = resolved_window(cfg);
    const RegularizationPolicy policy = cfg.reg.value_or(RegularizationPolicy::fixed(0.0));
    if (!policy.is_fixed()) throw ConfigError("reg", "continuous-updating alpha supports fixed lambda only");
    const double lam = policy.fixed_lambda();

    RunRecord rec;
    rec.method = "CU-Alpha";
    EvalLoop loop{problem, rec, cfg.tol, cfg.max_g_evals};

    SequenceWindow win(problem.dim, static_cast<std::size_t>(m) + 2);
    win.push(problem.initial_guess);
    // The first Picard iterate is kept: a one-column window only reproduces s_0.
    Vector g0 = loop.eval(win.at(0));
    if (loop.done()) return rec;
    win.push(std::move(g0));

    for (long j = 1; !loop.done(); ++j) {
        const Index mj = static_cast<Index>(std::min<long>(m, j));
        Vector picard = loop.eval(win.at(j));
        if (loop.done()) break;
        win.push(std::move(picard));
        try {
            auto alpha = shanks::solve_alpha_minres(delta_matrix(win, j - mj, mj + 1), cfg.metric, lam);
            win.replace_last(shanks::combine_alpha(iterate_slice(win, j - mj, mj + 1), alpha));
        } catch (const SingularSystem&) {
            // keep the Picard iterate for this step
        } catch (const DegenerateNormalization&) {
        }
    }
    return rec;
}

RunRecord run_continuous_beta(const FixedPointProblem& problem, const MethodConfig& cfg) {
    validate(cfg);
    const Index m = resolved_window(cfg);
    const RegularizationPolicy policy = cfg.reg.value_or(RegularizationPolicy::fixed(0.0));
    if (policy.is_grid_search()) throw ConfigError("reg", "continuous-updating beta supports fixed or GCV lambda");

    RunRecord rec;
    rec.method = "CU-Beta";
    EvalLoop loop{problem, rec, cfg.tol, cfg.max_g_evals};

    SequenceWindow win(problem.dim, static_cast<std::size_t>(m) + 2);
    win.push(problem.initial_guess);
    Vector g0 = loop.eval(win.at(0));
    if (loop.done()) return rec;
    win.push(std::move(g0));

    for (long j = 1; !loop.done(); ++j) {
        const Index mj = static_cast<Index>(std::min<long>(m, j));
        // The Picard iterate enters only the second differences and the
        // right-hand side; the combination replaces it.
        Vector picard = loop.eval(win.at(j));
        if (loop.done()) break;
        win.push(std::move(picard));
        try {
            const Matrix d2 = delta2_matrix(win, j - mj, mj);
            const Vector rhs = win.at(j + 1) - win.at(j);
            double lam = policy.is_fixed() ? policy.fixed_lambda() : lambda::gcv_select(d2, rhs, policy.grid());
            if (!policy.is_fixed()) loop.note_lambda(lam);
            auto beta = shanks::solve_beta_rre(d2, rhs, cfg.metric, lam);
            win.replace_last(shanks::combine_beta(win.at(j), delta_matrix(win, j - mj, mj), beta));
        } catch (const SingularSystem&) {
        }
    }
    return rec;
}

RunRecord run_atm(const FixedPointProblem& problem, const MethodConfig& cfg) {
    validate(cfg);
    if (!is_mixing(cfg.method)) throw ConfigError("method", "run_atm requires a mixing method");
    const Index m = resolved_window(cfg);

    RunRecord rec;
    rec.method = to_string(cfg.method);
    EvalLoop loop{problem, rec, cfg.tol, cfg.max_g_evals};

    AtmState state(problem.dim, m);
    if (cfg.method == Method::AtmMmpe) state.mmpe_y = sample_mmpe_matrix(problem.dim, m, cfg.seed);

    state.s_history.push(problem.initial_guess);
    Vector g = loop.eval(state.s_history.at(0));
    if (loop.done()) return rec;
    Vector f0 = g - state.s_history.at(0);
    state.f_history.push(f0);
    state.s_history.push(state.s_history.at(0) + cfg.mixing_beta * f0);
    state.j = 1;

    if (cfg.method == Method::AtmRre) {
        // One more damped bootstrap step so second differences exist.
        Vector g1 = loop.eval(state.s_history.at(1));
        if (loop.done()) return rec;
        Vector f1 = g1 - state.s_history.at(1);
        state.f_history.push(f1);
        state.s_history.push(state.s_history.at(1) + cfg.mixing_beta * f1);
        state.j = 2;
    }

    while (!loop.done()) {
        Vector gj = loop.eval(state.s_history.at(state.j));
        if (loop.done()) break;
        auto step = atm_step(state, gj, cfg);
        if (step.selected_lambda) loop.note_lambda(*step.selected_lambda);
    }
    return rec;
}

RunRecord run_stabilized_aa(const FixedPointProblem& problem, const MethodConfig& cfg) {
    validate(cfg);
    const Index m = resolved_window(cfg);

    RunRecord rec;
    rec.method = to_string(Method::StabilizedAA);
    EvalLoop loop{problem, rec, cfg.tol, cfg.max_g_evals};

    SequenceWindow s_win(problem.dim, static_cast<std::size_t>(m) + 2);
    SequenceWindow f_win(problem.dim, static_cast<std::size_t>(m) + 2);

    s_win.push(problem.initial_guess);
    Vector g = loop.eval(s_win.at(0));
    if (loop.done()) return rec;
    Vector f0 = g - s_win.at(0);
    f_win.push(f0);
    s_win.push(s_win.at(0) + cfg.mixing_beta * f0);

    for (long j = 1; !loop.done(); ++j) {
        Vector gj = loop.eval(s_win.at(j));
        if (loop.done()) break;
        Vector fj = gj - s_win.at(j);
        f_win.push(fj);

        const Index mj = static_cast<Index>(std::min<long>(m, j));
        const long lo = j - mj;
        const Matrix dF = delta_matrix(f_win, lo, mj);
        const Matrix dS = delta_matrix(s_win, lo, mj);
        const auto survivors = stabilized_filter(dF, cfg.tau);

        Vector next;
        if (survivors.kept.empty()) {
            next = s_win.at(j) + cfg.mixing_beta * fj; // H = -beta I
        } else {
            Matrix dFk(dF.rows(), static_cast<Index>(survivors.kept.size()));
            Matrix dSk(dS.rows(), static_cast<Index>(survivors.kept.size()));
            for (std::size_t c = 0; c < survivors.kept.size(); ++c) {
                dFk.col(static_cast<Index>(c)) = dF.col(survivors.kept[c]);
                dSk.col(static_cast<Index>(c)) = dS.col(survivors.kept[c]);
            }
            try {
                QuasiNewtonMatrixView h(std::move(dSk), std::move(dFk), cfg.mixing_beta, 0.0);
                next = s_win.at(j) - h.apply(fj);
            } catch (const SingularSystem&) {
                next = s_win.at(j) + cfg.mixing_beta * fj;
            }
        }
        s_win.push(std::move(next));
    }
    return rec;
}

RunRecord run_method(const FixedPointProblem& problem, const MethodConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    if (cfg.method == Method::PlainFixedPoint)
        rec = run_plain(problem, cfg);
    else if (is_restarted(cfg.method))
        rec = run_restarted(problem, cfg);
    else if (cfg.method == Method::StabilizedAA)
        rec = run_stabilized_aa(problem, cfg);
    else
        rec = run_atm(problem, cfg);
    rec.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(std::chrono::steady_clock::now() - start)
            .count();
    return rec;
}

} // namespace xtrap::drivers
