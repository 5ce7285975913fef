#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "xtrap/shanks.hpp"
#include "xtrap/window.hpp"

using namespace xtrap;
using namespace xtrap::shanks;
using oracles::random_matrix;
using oracles::random_vector;

namespace {

const MetricSpec kIdentity = MetricSpec::identity();

// s_n = (1,1)^T + 0.5^n (1,0)^T: a k = 1 kernel sequence with limit (1,1)^T.
SequenceWindow geometric_window(int count) {
    SequenceWindow w(2, static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        Vector s(2);
        s << 1.0 + std::pow(0.5, n), 1.0;
        w.push(s);
    }
    return w;
}

// All seven strategy routes for one linear kernel instance at k = p. Needs
// 2k+2 Picard iterates in the window.
std::vector<Vector> all_strategy_extrapolations(const oracles::LinearKernelInstance& inst, std::mt19937_64& rng) {
    const Index p = inst.m.rows();
    const Index k = p;
    SequenceWindow w(p, static_cast<std::size_t>(2 * k + 2));
    Vector s = inst.s0;
    w.push(s);
    for (Index n = 1; n < 2 * k + 2; ++n) {
        s = inst.m * s + inst.b;
        w.push(s);
    }

    std::vector<Vector> results;

    const Matrix dS = delta_matrix(w, 0, k + 1);
    const Matrix d2S = delta2_matrix(w, 0, k);
    const Vector rhs = w.at(k + 1) - w.at(k);
    const Matrix combine_t = iterate_slice(w, 1, k + 1);
    const Matrix dS_combine = delta_matrix(w, 1, k);
    const Vector anchor = w.at(k + 1);

    // minimal-residual alpha
    results.push_back(combine_alpha(combine_t, solve_alpha_minres(dS, kIdentity, 0.0)));
    // SVDA, sum-normalized singular vector
    {
        auto [v, sigma] = solve_alpha_svd(dS);
        results.push_back(combine_alpha(combine_t, AlphaCoeffs{v / v.sum()}));
    }
    // RRE beta
    results.push_back(combine_beta(anchor, dS_combine, solve_beta_rre(d2S, rhs, kIdentity, 0.0)));
    // MPE: Y columns are the shifted first differences
    results.push_back(combine_beta(anchor, dS_combine, solve_beta_general_y(d2S, rhs, delta_matrix(w, 0, k))));
    // MMPE: fixed random Y
    results.push_back(combine_beta(anchor, dS_combine, solve_beta_general_y(d2S, rhs, random_matrix(p, k, rng))));
    // topological alpha over the stacked window
    results.push_back(combine_alpha(iterate_slice(w, k, k + 1),
                                    solve_alpha_topological(stacked_delta(w, 0, k, k + 1), kIdentity, 0.0)));
    // topological beta over the stacked window
    {
        Vector stacked_rhs = stacked_column(w, k, k);
        auto beta = solve_beta_topological(stacked_delta2(w, 0, k, k), stacked_rhs, kIdentity, 0.0);
        results.push_back(combine_beta(w.at(2 * k), delta_matrix(w, k, k), beta));
    }
    return results;
}

} // namespace

TEST_CASE("solve_alpha_minres: geometric kernel sequence gives alpha = (-1, 2)") {
    SequenceWindow w = geometric_window(3);
    auto alpha = solve_alpha_minres(delta_matrix(w, 0, 2), kIdentity, 0.0);
    CHECK(alpha.values[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(alpha.values[1] == doctest::Approx(2.0).epsilon(1e-10));

    // cross-check against the constrained KKT oracle on the Gram matrix
    Matrix dS = delta_matrix(w, 0, 2);
    Vector ref = oracles::kkt_sum_constrained(dS.transpose() * dS);
    CHECK((alpha.values - ref).norm() <= 1e-8 * ref.norm());
}

TEST_CASE("solve_alpha_minres: exact one-dimensional kernel returns the kernel direction") {
    std::mt19937_64 rng(41);
    Matrix dS(4, 3);
    dS.col(0) = random_vector(4, rng);
    dS.col(1) = random_vector(4, rng);
    dS.col(2) = -0.25 * dS.col(0) + 0.75 * dS.col(1); // kernel (0.25, -0.75, 1)
    auto alpha = solve_alpha_minres(dS, kIdentity, 0.0);
    CHECK((dS * alpha.values).norm() <= 1e-10 * dS.norm());
    CHECK(std::abs(alpha.values.sum() - 1.0) <= 1e-13);
}

TEST_CASE("solve_alpha_minres: lambda -> 0 continuity on well-conditioned data") {
    std::mt19937_64 rng(42);
    Matrix dS = random_matrix(10, 4, rng);
    auto a0 = solve_alpha_minres(dS, kIdentity, 0.0);
    auto a1 = solve_alpha_minres(dS, kIdentity, 1e-14);
    CHECK((a0.values - a1.values).norm() <= 1e-6 * a0.values.norm());
}

TEST_CASE("solve_alpha_minres: explicit metric reweights the objective") {
    std::mt19937_64 rng(43);
    Matrix dS = random_matrix(6, 3, rng);
    Matrix y = random_matrix(6, 4, rng);
    auto via_factor = solve_alpha_minres(dS, MetricSpec::factor(y), 1e-3);
    auto via_explicit = solve_alpha_minres(dS, MetricSpec::explicit_spsd(y * y.transpose()), 1e-3);
    CHECK((via_factor.values - via_explicit.values).norm() <= 1e-9);
}

TEST_CASE("solve_alpha_svd: kernel-deficient matrix gives sigma = 0 and a null vector") {
    std::mt19937_64 rng(44);
    Matrix dS(5, 3);
    dS.col(0) = random_vector(5, rng);
    dS.col(1) = random_vector(5, rng);
    dS.col(2) = dS.col(0) - 2.0 * dS.col(1);
    auto [v, sigma] = solve_alpha_svd(dS);
    CHECK(sigma <= 1e-12 * dS.norm());
    CHECK((dS * v).norm() <= 1e-12 * dS.norm());
}

TEST_CASE("solve_alpha_svd: geometric sequence kernel direction") {
    SequenceWindow w = geometric_window(3);
    auto [v, sigma] = solve_alpha_svd(delta_matrix(w, 0, 2));
    Vector expected(2);
    expected << -1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0);
    const double err = std::min((v - expected).norm(), (v + expected).norm());
    CHECK(err <= 1e-10);
    CHECK(sigma <= 1e-12);
}

TEST_CASE("solve_alpha_svd: generic matrix achieves sigma_min of an SVD oracle") {
    std::mt19937_64 rng(45);
    Matrix dS = random_matrix(8, 4, rng);
    auto [v, sigma] = solve_alpha_svd(dS);
    Eigen::JacobiSVD<Matrix> svd(dS);
    CHECK(sigma == doctest::Approx(svd.singularValues().minCoeff()).epsilon(1e-12));
    CHECK((dS * v).norm() == doctest::Approx(sigma).epsilon(1e-10));
}

TEST_CASE("solve_beta_rre: scalar geometric sequence") {
    // s_n = 1 + 0.5^n: d2s_0 = 0.25, rhs = ds_1 = -0.25 -> beta = -1
    Matrix d2S(1, 1);
    d2S << 0.25;
    Vector rhs(1);
    rhs << -0.25;
    auto beta = solve_beta_rre(d2S, rhs, kIdentity, 0.0);
    CHECK(beta.values[0] == doctest::Approx(-1.0).epsilon(1e-13));

    // combine: t = s_2 - ds_1 * beta = 1.25 - (-0.25)(-1) = 1
    Matrix ds(1, 1);
    ds << -0.25;
    Vector anchor(1);
    anchor << 1.25;
    CHECK(combine_beta(anchor, ds, beta)[0] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("solve_beta_rre: zero right-hand side gives beta = 0") {
    std::mt19937_64 rng(46);
    Matrix d2S = random_matrix(7, 3, rng);
    for (double lambda : {0.0, 1e-4, 1.0}) {
        auto beta = solve_beta_rre(d2S, Vector::Zero(7), kIdentity, lambda);
        CHECK(beta.values.norm() <= 1e-14);
    }
}

TEST_CASE("solve_beta_rre: factored metric matches the general-Y square solve") {
    std::mt19937_64 rng(47);
    Matrix d2S = random_matrix(9, 3, rng);
    Vector rhs = random_vector(9, rng);
    Matrix y = random_matrix(9, 3, rng);
    auto via_metric = solve_beta_rre(d2S, rhs, MetricSpec::factor(y), 0.0);
    Matrix sys = y.transpose() * d2S;
    Vector ref = sys.fullPivLu().solve(y.transpose() * rhs);
    CHECK((via_metric.values - ref).norm() <= 1e-10 * (ref.norm() + 1.0));
}

TEST_CASE("solve_beta_general_y: Y = d2S recovers RRE") {
    std::mt19937_64 rng(48);
    Matrix d2S = random_matrix(8, 3, rng);
    Vector rhs = random_vector(8, rng);
    auto rre = solve_beta_rre(d2S, rhs, kIdentity, 0.0);
    auto general = solve_beta_general_y(d2S, rhs, d2S);
    CHECK((rre.values - general.values).norm() <= 1e-12 * (rre.values.norm() + 1.0));
}

TEST_CASE("solve_beta_general_y: singular Y^T d2S raises") {
    std::mt19937_64 rng(49);
    Matrix d2S = random_matrix(6, 2, rng);
    Matrix y(6, 2);
    y.col(0) = random_vector(6, rng);
    y.col(1) = y.col(0); // Y^T d2S has two identical rows
    CHECK_THROWS_AS(solve_beta_general_y(d2S, random_vector(6, rng), y), SingularSystem);
}

TEST_CASE("solve_alpha_topological: k = 1 stacking equals the minimal-residual alpha") {
    SequenceWindow w = geometric_window(4);
    auto minres = solve_alpha_minres(delta_matrix(w, 0, 2), kIdentity, 0.0);
    auto topo = solve_alpha_topological(stacked_delta(w, 0, 1, 2), kIdentity, 0.0);
    CHECK((minres.values - topo.values).norm() <= 1e-12);
}

TEST_CASE("solve_alpha_topological: sum-to-one holds for random stacked data") {
    std::mt19937_64 rng(50);
    for (double lambda : {0.0, 1e-6, 1e-2}) {
        Matrix stacked = random_matrix(12, 4, rng);
        auto alpha = solve_alpha_topological(stacked, kIdentity, lambda);
        CHECK(std::abs(alpha.values.sum() - 1.0) <= 1e-13);
    }
}

TEST_CASE("solve_theta_coupled: AA choice recovers the least-squares theta") {
    std::mt19937_64 rng(51);
    Matrix dF = random_matrix(10, 4, rng);
    Vector f = random_vector(10, rng);
    auto theta = solve_theta_coupled(dF, f, kIdentity, 0.0);
    Vector ref = oracles::qr_least_squares(dF, f);
    CHECK((theta.values - ref).norm() <= 1e-9 * ref.norm());
}

TEST_CASE("solve_theta_coupled: c orthogonal to range(M dC) gives theta = 0") {
    std::mt19937_64 rng(52);
    Matrix dC = random_matrix(6, 2, rng);
    // Build c orthogonal to both columns.
    Eigen::HouseholderQR<Matrix> qr(dC);
    Matrix q = qr.householderQ();
    Vector c = q.col(5);
    auto theta = solve_theta_coupled(dC, c, kIdentity, 0.0);
    CHECK(theta.values.norm() <= 1e-12);
}

TEST_CASE("solve_theta_coupled: regularized solve matches the ridge normal equations") {
    std::mt19937_64 rng(53);
    Matrix dC = random_matrix(12, 5, rng);
    Vector c = random_vector(12, rng);
    const double lambda = 3e-3;
    auto theta = solve_theta_coupled(dC, c, kIdentity, lambda);
    Matrix a = dC.transpose() * dC + lambda * Matrix::Identity(5, 5);
    Vector ref = a.fullPivLu().solve(dC.transpose() * c);
    CHECK((theta.values - ref).norm() <= 1e-10 * ref.norm());
}

TEST_CASE("combine_alpha: selector weight picks a column") {
    std::mt19937_64 rng(54);
    Matrix s = random_matrix(5, 3, rng);
    Vector w = Vector::Zero(3);
    w[0] = 1.0;
    CHECK((combine_alpha(s, AlphaCoeffs{w}) - s.col(0)).norm() == 0.0);
}

TEST_CASE("combine_alpha: geometric example lands on the limit") {
    SequenceWindow w = geometric_window(3);
    Vector alpha(2);
    alpha << -1.0, 2.0;
    Vector t = combine_alpha(iterate_slice(w, 0, 2), AlphaCoeffs{alpha});
    CHECK(t[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("combine_beta: zero coefficients return the anchor") {
    std::mt19937_64 rng(55);
    Vector anchor = random_vector(4, rng);
    Matrix ds = random_matrix(4, 2, rng);
    CHECK((combine_beta(anchor, ds, BetaCoeffs{Vector::Zero(2)}) - anchor).norm() == 0.0);
}

TEST_CASE("shift independence: kernel sequences extrapolate identically from any start") {
    std::mt19937_64 rng(56);
    auto inst = oracles::linear_kernel_instance(5, 0.9, rng);
    const Index k = 5;
    SequenceWindow w(5, 2 * k + 3);
    Vector s = inst.s0;
    w.push(s);
    for (Index n = 1; n < 2 * k + 3; ++n) {
        s = inst.m * s + inst.b;
        w.push(s);
    }
    // alpha route from n = 0 and n = 1
    auto a0 = solve_alpha_minres(delta_matrix(w, 0, k + 1), kIdentity, 0.0);
    auto a1 = solve_alpha_minres(delta_matrix(w, 1, k + 1), kIdentity, 0.0);
    Vector t0 = combine_alpha(iterate_slice(w, 0, k + 1), a0);
    Vector t1 = combine_alpha(iterate_slice(w, 1, k + 1), a1);
    CHECK((t0 - t1).norm() <= 1e-8 * (t0.norm() + 1.0));
    CHECK((t0 - inst.solution).norm() <= 1e-8 * inst.solution.norm());

    // beta route: anchor at n + k and n + k + 1
    auto b0 = solve_beta_rre(delta2_matrix(w, 0, k), w.at(k + 1) - w.at(k), kIdentity, 0.0);
    Vector tb0 = combine_beta(w.at(k), delta_matrix(w, 0, k), b0);
    Vector tb1 = combine_beta(w.at(k + 1), delta_matrix(w, 1, k), b0);
    CHECK((tb0 - tb1).norm() <= 1e-8 * (tb0.norm() + 1.0));
}

TEST_CASE("kernel exactness: all seven strategies on random linear problems") {
    std::mt19937_64 rng(57);
    for (Index p : {3, 5, 8}) {
        for (double rho : {0.5, 0.9, 1.3}) {
            auto inst = oracles::linear_kernel_instance(p, rho, rng);
            auto results = all_strategy_extrapolations(inst, rng);
            REQUIRE(results.size() == 7);
            for (const auto& t : results) CHECK((t - inst.solution).norm() <= 1e-8 * inst.solution.norm());
        }
    }
}

TEST_CASE("reduction: RRE equals general-Y at Y = d2S on kernel data") {
    std::mt19937_64 rng(58);
    auto inst = oracles::linear_kernel_instance(4, 0.7, rng);
    auto iterates = oracles::picard_iterates(inst, 7);
    SequenceWindow w(4, 7);
    for (const auto& v : iterates) w.push(v);
    Matrix d2S = delta2_matrix(w, 0, 4);
    Vector rhs = w.at(5) - w.at(4);
    auto rre = solve_beta_rre(d2S, rhs, kIdentity, 0.0);
    auto gen = solve_beta_general_y(d2S, rhs, d2S);
    CHECK((rre.values - gen.values).norm() <= 1e-12 * (rre.values.norm() + 1.0));
}

TEST_CASE("lambda-monotone norm: ||beta|| non-increasing over the grid") {
    std::mt19937_64 rng(59);
    Matrix d2S = random_matrix(14, 5, rng);
    Vector rhs = random_vector(14, rng);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 1e-12, 1e-8, 1e-4, 1e-2, 1.0}) {
        const double n = solve_beta_rre(d2S, rhs, kIdentity, lambda).values.norm();
        CHECK(n <= previous * (1.0 + 1e-12));
        previous = n;
    }
}

TEST_CASE("Aitken case: k = 1 on a scalar geometric sequence is exact") {
    // s_n = 3 + 2 * 0.8^n
    auto s = [](int n) { return 3.0 + 2.0 * std::pow(0.8, n); };
    SequenceWindow w(1, 3);
    for (int n = 0; n < 3; ++n) w.push(Vector::Constant(1, s(n)));

    Matrix d2S(1, 1);
    d2S << (s(2) - s(1)) - (s(1) - s(0));
    Vector rhs(1);
    rhs << s(2) - s(1);
    auto beta = solve_beta_rre(d2S, rhs, kIdentity, 0.0);
    Matrix ds(1, 1);
    ds << s(2) - s(1);
    Vector t = combine_beta(w.at(2), ds, beta);

    // Aitken's delta-squared closed form
    const double dx = s(1) - s(0);
    const double dx2 = s(2) - 2.0 * s(1) + s(0);
    const double aitken = s(0) - dx * dx / dx2;
    CHECK(t[0] == doctest::Approx(aitken).epsilon(1e-12));
    CHECK(t[0] == doctest::Approx(3.0).epsilon(1e-12));
}
