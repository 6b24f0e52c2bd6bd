#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "eann/network.hpp"
#include "eann/objective.hpp"
#include "eann/rng.hpp"
#include "eann/trainers.hpp"
#include "oracles.hpp"

using namespace eann;

namespace {

// Constant objective whose reported slope never vanishes. No step can
// achieve any decrease, which drives line searches and trust regions into
// their give-up paths.
class FlatDeceptiveProblem final : public TrainingProblem {
public:
    std::size_t param_count() const override { return 1; }
    std::size_t pattern_count() const override { return 1; }

    double sse(std::span<const double>) const override { return 1.0; }
    double sse_and_gradient(std::span<const double>, std::vector<double>& grad) const override {
        grad.assign(1, 1.0);
        return 1.0;
    }
    ResidualJacobian residual_jacobian(std::span<const double>) const override {
        ResidualJacobian rj;
        rj.residuals = {1.0};
        rj.jacobian = Matrix(1, 1, 1.0);
        return rj;
    }
};

// Single residual e(w) = w^2 - 1. Curvature flips sign around the start
// point used below, which forces a secant pair with s.y <= 0.
class SquareResidualProblem final : public TrainingProblem {
public:
    std::size_t param_count() const override { return 1; }
    std::size_t pattern_count() const override { return 1; }

    double sse(std::span<const double> w) const override {
        const double e = w[0] * w[0] - 1.0;
        return e * e;
    }
    double sse_and_gradient(std::span<const double> w, std::vector<double>& grad) const override {
        const double e = w[0] * w[0] - 1.0;
        grad.assign(1, e * 2.0 * w[0]);
        return e * e;
    }
    ResidualJacobian residual_jacobian(std::span<const double> w) const override {
        ResidualJacobian rj;
        rj.residuals = {w[0] * w[0] - 1.0};
        rj.jacobian = Matrix(1, 1);
        rj.jacobian(0, 0) = 2.0 * w[0];
        return rj;
    }
};

LinearProblem random_linear(Rng& rng, std::size_t dim, std::size_t patterns) {
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    Matrix design(patterns, dim);
    for (auto& v : design.data()) v = u(rng);
    std::vector<double> w_true(dim);
    for (auto& v : w_true) v = 3.0 * u(rng);
    std::vector<double> targets(patterns);
    for (std::size_t p = 0; p < patterns; ++p)
        targets[p] = dot(design.row(p), w_true) + noise(rng);
    return LinearProblem(std::move(design), std::move(targets));
}

NetworkProblem random_network_problem(Rng& rng, std::size_t hidden) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n_inputs = 3, patterns = 20;
    EvaluationBatch batch;
    batch.inputs = Matrix(patterns, n_inputs);
    for (auto& v : batch.inputs.data()) v = u(rng);
    batch.targets.resize(patterns);
    for (std::size_t p = 0; p < patterns; ++p)
        batch.targets[p] = std::sin(dot(batch.inputs.row(p), std::vector<double>{1.0, -0.5, 0.3}));
    std::vector<Activation> acts(hidden, Activation::T);
    return NetworkProblem({n_inputs, acts}, std::move(batch));
}

std::vector<double> random_start(Rng& rng, std::size_t n, double scale = 0.3) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> w(n);
    for (auto& v : w) v = u(rng);
    return w;
}

}  // namespace

TEST_CASE("trainer tags round trip, case-insensitively") {
    CHECK(kTrainerKindCount == 4);
    for (const TrainerKind kind :
         {TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}) {
        CHECK(parse_trainer_tag(trainer_tag(kind)) == kind);
        std::string low(trainer_tag(kind));
        for (char& c : low) c = (char)std::tolower((unsigned char)c);
        CHECK(parse_trainer_tag(low) == kind);
    }
    CHECK_FALSE(parse_trainer_tag("GD").has_value());
    CHECK_FALSE(parse_trainer_tag("").has_value());
}

TEST_CASE("hyperparameter ranges and midpoint defaults") {
    CHECK(trainer_param_count(TrainerKind::BP) == 2);
    CHECK(trainer_param_count(TrainerKind::SCG) == 2);
    CHECK(trainer_param_count(TrainerKind::QNA) == 4);
    CHECK(trainer_param_count(TrainerKind::LM) == 1);

    const auto bp = trainer_param_ranges(TrainerKind::BP);
    CHECK(bp[0].lo == 0.05);
    CHECK(bp[0].hi == 0.25);
    CHECK(bp[1].lo == 0.05);
    CHECK(bp[1].hi == 0.25);
    const auto scg = trainer_param_ranges(TrainerKind::SCG);
    CHECK(scg[0].lo == 0.0);
    CHECK(scg[0].hi == 1e-4);
    CHECK(scg[1].lo == 0.0);
    CHECK(scg[1].hi == 1e-6);
    const auto qna = trainer_param_ranges(TrainerKind::QNA);
    CHECK(qna[0].lo == 1e-6);
    CHECK(qna[0].hi == 100.0);
    CHECK(qna[1].lo == 0.1);
    CHECK(qna[1].hi == 0.6);
    CHECK(qna[2].lo == 0.001);
    CHECK(qna[2].hi == 0.003);
    CHECK(qna[3].lo == 0.1);
    CHECK(qna[3].hi == 0.4);
    const auto lm = trainer_param_ranges(TrainerKind::LM);
    CHECK(lm[0].lo == 0.001);
    CHECK(lm[0].hi == 0.02);

    for (const TrainerKind kind :
         {TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}) {
        const TrainerSpec spec = default_spec(kind);
        CHECK_NOTHROW(validate_spec(spec));
        const auto ranges = trainer_param_ranges(kind);
        for (std::size_t i = 0; i < ranges.size(); ++i)
            CHECK(spec.params[i] == doctest::Approx(0.5 * (ranges[i].lo + ranges[i].hi)));
    }

    TrainerSpec bad = default_spec(TrainerKind::BP);
    bad.params[0] = 0.3;
    CHECK_THROWS_AS(validate_spec(bad), std::invalid_argument);
    bad.params[0] = std::nan("");
    CHECK_THROWS_AS(validate_spec(bad), std::invalid_argument);
}

TEST_CASE("one gradient-descent epoch does arithmetic by hand") {
    // e = w - 2 at w = 0: gradient of sse/2 is -2, so the step is +lr*2.
    // The initial velocity is zero, so momentum does not move this epoch.
    LinearProblem problem(Matrix(1, 1, 1.0), {2.0});
    TrainerSpec spec{TrainerKind::BP, {0.1, 0.05}};
    const auto res = train_bp(problem, std::vector<double>{0.0}, spec, 1);
    REQUIRE(res.final_params.size() == 1);
    CHECK(res.final_params[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(res.epochs_used == 1);
    CHECK(res.epoch_rmse.size() == 1);
    CHECK(res.epoch_rmse[0] == doctest::Approx(1.8).epsilon(1e-15));
}

TEST_CASE("momentum carries the previous velocity") {
    // Two epochs: v1 = 0.2, w1 = 0.2; v2 = lr*1.8 + 0.25*v1 = 0.23.
    LinearProblem problem(Matrix(1, 1, 1.0), {2.0});
    TrainerSpec spec{TrainerKind::BP, {0.1, 0.25}};
    const auto res = train_bp(problem, std::vector<double>{0.0}, spec, 2);
    CHECK(res.final_params[0] == doctest::Approx(0.2 + 0.18 + 0.05).epsilon(1e-12));
}

TEST_CASE("one damped least-squares epoch does arithmetic by hand") {
    // e = w - 3 at w = 1: J = [1], g = -2, (1 + mu) d = 2 with mu = 1.
    LinearProblem problem(Matrix(1, 1, 1.0), {3.0});
    const auto delta = lm_step(problem, std::vector<double>{1.0}, 1.0);
    REQUIRE(delta.has_value());
    CHECK((*delta)[0] == doctest::Approx(1.0).epsilon(1e-12));

    TrainerSpec spec{TrainerKind::LM, {0.02}};
    const auto res = train_lm(problem, std::vector<double>{1.0}, spec, 1);
    // mu_init 0.02: (1.02) d = 2 -> w = 1 + 1.9608, residual shrinks and is accepted.
    CHECK(res.final_params[0] == doctest::Approx(1.0 + 2.0 / 1.02).epsilon(1e-12));
    CHECK(res.epoch_rmse[0] == doctest::Approx(std::fabs(res.final_params[0] - 3.0)).epsilon(1e-12));
}

TEST_CASE("all four trainers recover the least-squares solution of linear problems") {
    Rng rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t dim = 2 + trial % 3;
        const LinearProblem problem = random_linear(rng, dim, 10 * dim);
        const std::vector<double> expected =
            oracle::least_squares(problem.design(), problem.targets());
        const auto w0 = random_start(rng, dim);

        const auto check = [&](TrainerKind kind, std::size_t epochs) {
            const auto res = train(problem, w0, default_spec(kind), epochs);
            CAPTURE(trial);
            CAPTURE(trainer_tag(kind));
            CHECK(oracle::max_abs_diff(res.final_params, expected) < 1e-5);
        };
        check(TrainerKind::BP, 20000);
        check(TrainerKind::SCG, 300);
        check(TrainerKind::QNA, 300);
        check(TrainerKind::LM, 60);
    }
}

TEST_CASE("accepted-step trainers never record an RMSE increase") {
    Rng rng(202);
    for (int run = 0; run < 6; ++run) {
        const NetworkProblem problem = random_network_problem(rng, 2 + run % 4);
        const auto w0 = random_start(rng, problem.param_count());
        for (const TrainerKind kind : {TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}) {
            const auto res = train(problem, w0, default_spec(kind), 40);
            CAPTURE(run);
            CAPTURE(trainer_tag(kind));
            for (std::size_t e = 1; e < res.epoch_rmse.size(); ++e)
                CHECK(res.epoch_rmse[e] <= res.epoch_rmse[e - 1]);
        }
    }
}

TEST_CASE("trainers respect a zero epoch budget") {
    LinearProblem problem(Matrix(1, 1, 1.0), {2.0});
    const std::vector<double> w0{0.5};
    for (const TrainerKind kind :
         {TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}) {
        const auto res = train(problem, w0, default_spec(kind), 0);
        CHECK(res.final_params == w0);
        CHECK(res.epochs_used == 0);
        CHECK(res.epoch_rmse.empty());
        CHECK(res.termination == Termination::budget_exhausted);
    }
}

TEST_CASE("trainers report convergence at a zero-residual minimum") {
    LinearProblem problem(Matrix(1, 1, 1.0), {1.0});
    const std::vector<double> w0{1.0};
    for (const TrainerKind kind :
         {TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}) {
        const auto res = train(problem, w0, default_spec(kind), 10);
        CAPTURE(trainer_tag(kind));
        CHECK(res.termination == Termination::converged);
        CHECK(res.final_params[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("gradient descent reports numerical failure on an exploding problem") {
    // Huge input scale makes the fixed-rate step overshoot catastrophically.
    LinearProblem problem(Matrix(1, 1, 1e8), {1.0});
    const auto res = train_bp(problem, std::vector<double>{0.0}, default_spec(TrainerKind::BP), 100);
    CHECK(res.termination == Termination::numerical_failure);
    CHECK(all_finite(res.final_params));
}

TEST_CASE("curvature-flip secant pairs are skipped, not applied") {
    SquareResidualProblem problem;
    TrainerSpec spec{TrainerKind::QNA, {0.2, 0.35, 0.002, 0.25}};
    const auto res = train_qna(problem, std::vector<double>{0.1}, spec, 1);
    CHECK(res.skipped_updates == 1);
    CHECK(res.restarts == 0);
    // The accepted step still went downhill.
    CHECK(res.epoch_rmse[0] < std::fabs(0.1 * 0.1 - 1.0));
}

TEST_CASE("an abandoned line search counts a restart and leaves weights alone") {
    FlatDeceptiveProblem problem;
    TrainerSpec spec{TrainerKind::QNA, {0.2, 0.35, 0.002, 0.25}};
    const auto res = train_qna(problem, std::vector<double>{0.5}, spec, 3);
    CHECK(res.restarts == 3);
    CHECK(res.final_params == std::vector<double>{0.5});
    CHECK(res.epoch_rmse == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(res.termination == Termination::budget_exhausted);
}

TEST_CASE("quasi-Newton matches gradient descent direction on its first step") {
    // With H = I the first direction is exactly -g.
    LinearProblem problem(Matrix(1, 1, 1.0), {2.0});
    TrainerSpec spec{TrainerKind::QNA, {0.1, 0.6, 0.001, 0.25}};
    const auto res = train_qna(problem, std::vector<double>{0.0}, spec, 1);
    // g = -2, d = (0,2), step alpha = min(0.1, 0.6*1/2) = 0.1 -> w = 0.2.
    CHECK(res.final_params[0] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("rejected steps inflate damping until training gives up") {
    // Every trial is rejected, so mu climbs by 10x per epoch from 0.0105
    // until it crosses 1e10 after 12 rejections.
    FlatDeceptiveProblem problem;
    TrainerSpec spec{TrainerKind::LM, {0.0105}};
    const auto res = train_lm(problem, std::vector<double>{0.0}, spec, 2000);
    CHECK(res.termination == Termination::converged);
    CHECK(res.epochs_used == 12);
    CHECK(res.final_params == std::vector<double>{0.0});
    for (const double r : res.epoch_rmse) CHECK(r == 1.0);
}

TEST_CASE("a zero gradient at the start converges without consuming epochs") {
    LinearProblem problem(Matrix(1, 1, 0.0), {1.0});
    const auto res = train_lm(problem, std::vector<double>{0.0}, default_spec(TrainerKind::LM), 50);
    CHECK(res.termination == Termination::converged);
    CHECK(res.epochs_used == 0);
    CHECK(res.final_params[0] == 0.0);
}

TEST_CASE("dispatch routes by spec kind and network wrappers match problem calls") {
    Rng rng(303);
    const NetworkProblem problem = random_network_problem(rng, 3);
    const auto w0 = random_start(rng, problem.param_count());
    for (const TrainerKind kind :
         {TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM}) {
        const TrainerSpec spec = default_spec(kind);
        const auto via_dispatch = train(problem, w0, spec, 5);
        const auto net = unflatten_params(problem.shape(), w0);
        const auto via_net = train(net, problem.batch(), spec, 5);
        CHECK(via_dispatch.final_params == via_net.final_params);
        CHECK(via_dispatch.epoch_rmse == via_net.epoch_rmse);
        CHECK(via_dispatch.termination == via_net.termination);
    }

    TrainerSpec mismatched = default_spec(TrainerKind::LM);
    CHECK_THROWS_AS((void)train_bp(problem, w0, mismatched, 1), std::invalid_argument);
}

TEST_CASE("scaled conjugate gradient makes quick progress on a quadratic") {
    // On an exact quadratic the conjugate directions finish in about
    // param_count accepted steps.
    Rng rng(404);
    const LinearProblem problem = random_linear(rng, 4, 40);
    const auto expected = oracle::least_squares(problem.design(), problem.targets());
    const auto res = train_scg(problem, random_start(rng, 4), default_spec(TrainerKind::SCG), 50);
    CHECK(oracle::max_abs_diff(res.final_params, expected) < 1e-6);
}
