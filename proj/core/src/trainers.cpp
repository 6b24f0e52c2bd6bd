#include "eann/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eann {

namespace {

constexpr std::array<ParamRange, 2> kBpRanges{{
    {"learning_rate", 0.05, 0.25},
    {"momentum", 0.05, 0.25},
}};
constexpr std::array<ParamRange, 2> kScgRanges{{
    {"sigma", 0.0, 1e-4},
    {"lambda_init", 0.0, 1e-6},
}};
constexpr std::array<ParamRange, 4> kQnaRanges{{
    {"initial_step", 1e-6, 100.0},
    {"max_rel_step", 0.1, 0.6},
    {"armijo_c", 0.001, 0.003},
    {"contraction", 0.1, 0.4},
}};
constexpr std::array<ParamRange, 1> kLmRanges{{
    {"mu_init", 0.001, 0.02},
}};

constexpr double kSigmaFloor = 1e-8;   // sigma = 0 is in range but breaks finite differencing
constexpr double kMuCollapse = 1e10;   // damping beyond this means the trust region collapsed
constexpr double kMuFloor = 1e-12;
constexpr double kMuFactor = 10.0;
constexpr int kMaxBacktracks = 50;

double to_rmse(double sse, std::size_t patterns) {
    return std::sqrt(sse / static_cast<double>(patterns));
}

bool is_converged(double sse, std::span<const double> grad) {
    return norm_inf(grad) < kGradTolerance || sse < kSseTolerance;
}

// Best finite iterate seen so far; returned on numerical failure.
struct BestIterate {
    std::vector<double> params;
    double sse = std::numeric_limits<double>::infinity();

    void observe(std::span<const double> w, double s) {
        if (std::isfinite(s) && s < sse) {
            sse = s;
            params.assign(w.begin(), w.end());
        }
    }
};

void expect_kind(const TrainerSpec& spec, TrainerKind kind, const char* fn) {
    if (spec.kind != kind)
        throw std::invalid_argument(std::string(fn) + ": spec kind is "
                                    + std::string(trainer_tag(spec.kind)));
}

}  // namespace

std::string_view trainer_tag(TrainerKind kind) {
    switch (kind) {
        case TrainerKind::BP: return "BP";
        case TrainerKind::SCG: return "SCG";
        case TrainerKind::QNA: return "QNA";
        case TrainerKind::LM: return "LM";
    }
    return "?";
}

std::optional<TrainerKind> parse_trainer_tag(std::string_view tag) {
    std::string up(tag);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "BP") return TrainerKind::BP;
    if (up == "SCG") return TrainerKind::SCG;
    if (up == "QNA") return TrainerKind::QNA;
    if (up == "LM") return TrainerKind::LM;
    return std::nullopt;
}

std::span<const ParamRange> trainer_param_ranges(TrainerKind kind) {
    switch (kind) {
        case TrainerKind::BP: return kBpRanges;
        case TrainerKind::SCG: return kScgRanges;
        case TrainerKind::QNA: return kQnaRanges;
        case TrainerKind::LM: return kLmRanges;
    }
    return {};
}

std::size_t trainer_param_count(TrainerKind kind) { return trainer_param_ranges(kind).size(); }

bool operator==(const TrainerSpec& a, const TrainerSpec& b) {
    if (a.kind != b.kind) return false;
    const std::size_t n = trainer_param_count(a.kind);
    for (std::size_t i = 0; i < n; ++i)
        if (a.params[i] != b.params[i]) return false;
    return true;
}

TrainerSpec default_spec(TrainerKind kind) {
    TrainerSpec spec;
    spec.kind = kind;
    const auto ranges = trainer_param_ranges(kind);
    for (std::size_t i = 0; i < ranges.size(); ++i)
        spec.params[i] = 0.5 * (ranges[i].lo + ranges[i].hi);
    return spec;
}

void validate_spec(const TrainerSpec& spec) {
    const auto ranges = trainer_param_ranges(spec.kind);
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const double v = spec.params[i];
        if (!(v >= ranges[i].lo && v <= ranges[i].hi))
            throw std::invalid_argument("trainer spec: " + std::string(trainer_tag(spec.kind)) + " "
                                        + std::string(ranges[i].name) + " = " + std::to_string(v)
                                        + " outside [" + std::to_string(ranges[i].lo) + ", "
                                        + std::to_string(ranges[i].hi) + "]");
    }
}

std::string_view termination_tag(Termination t) {
    switch (t) {
        case Termination::budget_exhausted: return "budget_exhausted";
        case Termination::converged: return "converged";
        case Termination::numerical_failure: return "numerical_failure";
    }
    return "?";
}

TrainingResult train_bp(const TrainingProblem& problem, std::span<const double> initial,
                        const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::BP, "train_bp");
    validate_spec(spec);

    TrainingResult res;
    res.final_params.assign(initial.begin(), initial.end());
    if (epochs == 0) return res;

    std::vector<double> w(initial.begin(), initial.end());
    std::vector<double> grad, velocity(w.size(), 0.0);
    BestIterate best;
    double cur_sse;
    try {
        cur_sse = problem.sse_and_gradient(w, grad);
    } catch (const numerical_error&) {
        res.termination = Termination::numerical_failure;
        return res;
    }
    best.observe(w, cur_sse);

    const double lr = spec.learning_rate();
    const double mom = spec.momentum();

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        if (is_converged(cur_sse, grad)) {
            res.termination = Termination::converged;
            break;
        }
        for (std::size_t j = 0; j < w.size(); ++j) {
            velocity[j] = -lr * grad[j] + mom * velocity[j];
            w[j] += velocity[j];
        }
        bool ok = all_finite(w);
        if (ok) {
            try {
                cur_sse = problem.sse_and_gradient(w, grad);
            } catch (const numerical_error&) {
                ok = false;
            }
        }
        if (!ok) {
            res.termination = Termination::numerical_failure;
            w = best.params;
            break;
        }
        res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
        best.observe(w, cur_sse);
    }

    if (res.termination == Termination::budget_exhausted && is_converged(cur_sse, grad))
        res.termination = Termination::converged;
    res.epochs_used = res.epoch_rmse.size();
    res.final_params = std::move(w);
    return res;
}

TrainingResult train_scg(const TrainingProblem& problem, std::span<const double> initial,
                         const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::SCG, "train_scg");
    validate_spec(spec);

    TrainingResult res;
    res.final_params.assign(initial.begin(), initial.end());
    if (epochs == 0) return res;

    const std::size_t n = problem.param_count();
    const double sigma_base = std::max(spec.sigma(), kSigmaFloor);

    std::vector<double> w(initial.begin(), initial.end());
    std::vector<double> grad, grad_pert, r(n), p(n), r_new(n), w_pert(n);
    BestIterate best;
    double cur_sse;
    try {
        cur_sse = problem.sse_and_gradient(w, grad);
    } catch (const numerical_error&) {
        res.termination = Termination::numerical_failure;
        return res;
    }
    best.observe(w, cur_sse);
    for (std::size_t j = 0; j < n; ++j) r[j] = -grad[j], p[j] = r[j];

    double lambda = spec.lambda_init();
    double lambda_bar = 0.0;
    double delta = 0.0;  // curvature p^T H p, approximated on success steps
    bool success = true;
    std::size_t since_restart = 0;

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        if (is_converged(cur_sse, grad)) {
            res.termination = Termination::converged;
            break;
        }
        const double norm_p2 = dot(p, p);
        if (!(norm_p2 > 0.0)) {  // direction vanished: fall back to steepest descent
            p = r;
            res.restarts++;
            res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
            continue;
        }

        bool failed = false;
        if (success) {
            // Hessian-vector product along p by a forward difference of the
            // gradient; the loss is sse/2 so grad already carries that scale.
            const double sigma_k = sigma_base / std::sqrt(norm_p2);
            for (std::size_t j = 0; j < n; ++j) w_pert[j] = w[j] + sigma_k * p[j];
            try {
                problem.sse_and_gradient(w_pert, grad_pert);
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += p[j] * (grad_pert[j] - grad[j]);
                delta = acc / sigma_k;
            } catch (const numerical_error&) {
                failed = true;
            }
        }
        if (failed || !std::isfinite(delta)) {
            res.termination = Termination::numerical_failure;
            w = best.params;
            break;
        }

        double delta_eff = delta + (lambda - lambda_bar) * norm_p2;
        if (delta_eff <= 0.0) {  // indefinite: raise the scaling until positive definite
            lambda_bar = 2.0 * (lambda - delta_eff / norm_p2);
            delta_eff = -delta_eff + lambda * norm_p2;
            lambda = lambda_bar;
        }

        const double mu = dot(p, r);
        if (!(delta_eff > 0.0) || !std::isfinite(mu) || mu == 0.0) {
            // Degenerate direction; restart with steepest descent.
            p = r;
            success = true;
            lambda_bar = 0.0;
            since_restart = 0;
            res.restarts++;
            res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
            continue;
        }

        const double alpha = mu / delta_eff;
        double trial_sse = std::numeric_limits<double>::infinity();
        try {
            for (std::size_t j = 0; j < n; ++j) w_pert[j] = w[j] + alpha * p[j];
            trial_sse = problem.sse(w_pert);
        } catch (const numerical_error&) {
            trial_sse = std::numeric_limits<double>::infinity();
        }

        // Comparison parameter against the local quadratic model (loss sse/2).
        const double comparison = std::isfinite(trial_sse)
            ? delta_eff * (cur_sse - trial_sse) / (mu * mu)
            : -1.0;

        if (comparison >= 0.0) {
            // Accept the step and build the next conjugate direction.
            std::swap(w, w_pert);
            try {
                cur_sse = problem.sse_and_gradient(w, grad);
            } catch (const numerical_error&) {
                res.termination = Termination::numerical_failure;
                w = best.params;
                break;
            }
            best.observe(w, cur_sse);
            for (std::size_t j = 0; j < n; ++j) r_new[j] = -grad[j];
            lambda_bar = 0.0;
            success = true;
            since_restart++;
            if (since_restart >= n) {
                p = r_new;
                since_restart = 0;
            } else {
                double rr = 0.0, rold = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    rr += r_new[j] * r_new[j];
                    rold += r_new[j] * r[j];
                }
                const double beta = (rr - rold) / mu;
                for (std::size_t j = 0; j < n; ++j) p[j] = r_new[j] + beta * p[j];
            }
            r = r_new;
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (comparison < 0.25) lambda += delta_eff * (1.0 - comparison) / norm_p2;
        lambda = std::max(lambda, 0.0);

        res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
    }

    if (res.termination == Termination::budget_exhausted && is_converged(cur_sse, grad))
        res.termination = Termination::converged;
    res.epochs_used = res.epoch_rmse.size();
    res.final_params = std::move(w);
    return res;
}

TrainingResult train_qna(const TrainingProblem& problem, std::span<const double> initial,
                         const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::QNA, "train_qna");
    validate_spec(spec);

    TrainingResult res;
    res.final_params.assign(initial.begin(), initial.end());
    if (epochs == 0) return res;

    const std::size_t n = problem.param_count();
    std::vector<double> w(initial.begin(), initial.end());
    std::vector<double> grad, grad_new, d(n), trial(n), s(n), y(n), hy(n);
    BestIterate best;
    double cur_sse;
    try {
        cur_sse = problem.sse_and_gradient(w, grad);
    } catch (const numerical_error&) {
        res.termination = Termination::numerical_failure;
        return res;
    }
    best.observe(w, cur_sse);

    Matrix h(n, n, 0.0);
    auto reset_h = [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) h(i, j) = (i == j) ? 1.0 : 0.0;
    };
    reset_h();

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        if (is_converged(cur_sse, grad)) {
            res.termination = Termination::converged;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc -= h(i, j) * grad[j];
            d[i] = acc;
        }
        double gd = dot(grad, d);
        if (!(gd < 0.0) || !all_finite(d)) {  // not a descent direction: fall back
            reset_h();
            for (std::size_t i = 0; i < n; ++i) d[i] = -grad[i];
            gd = -dot(grad, grad);
            res.restarts++;
        }

        // Trial step: the evolved initial step, clipped so the parameter
        // change stays within max_rel_step relative to the current weights.
        const double dn = norm2(d);
        const double wn = std::max(norm2(w), 1.0);
        double alpha = std::min(spec.initial_step(), spec.max_rel_step() * wn / std::max(dn, 1e-300));
        double trial_sse = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = w[j] + alpha * d[j];
            bool finite_trial = all_finite(trial);
            if (finite_trial) {
                try {
                    trial_sse = problem.sse(trial);
                } catch (const numerical_error&) {
                    finite_trial = false;
                }
            }
            // Sufficient decrease: sse drop of at least armijo_c * alpha * |g.d|.
            if (finite_trial && cur_sse - trial_sse >= spec.armijo_c() * alpha * (-gd)) {
                accepted = true;
                break;
            }
            alpha *= spec.contraction();
        }

        if (!accepted) {  // abandoned line search: parameters unchanged this epoch
            reset_h();
            res.restarts++;
            res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
            continue;
        }

        for (std::size_t j = 0; j < n; ++j) s[j] = alpha * d[j];
        std::swap(w, trial);
        try {
            trial_sse = problem.sse_and_gradient(w, grad_new);
        } catch (const numerical_error&) {
            res.termination = Termination::numerical_failure;
            w = best.params;
            break;
        }
        cur_sse = trial_sse;
        best.observe(w, cur_sse);

        for (std::size_t j = 0; j < n; ++j) y[j] = grad_new[j] - grad[j];
        const double sy = dot(s, y);
        if (sy > 0.0) {
            // BFGS update of the inverse-Hessian approximation.
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += h(i, j) * y[j];
                hy[i] = acc;
            }
            const double yhy = dot(y, hy);
            const double c1 = (sy + yhy) / (sy * sy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h(i, j) += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        } else {
            res.skipped_updates++;  // curvature condition failed; keep the approximation
        }
        grad = grad_new;
        res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
    }

    if (res.termination == Termination::budget_exhausted && is_converged(cur_sse, grad))
        res.termination = Termination::converged;
    res.epochs_used = res.epoch_rmse.size();
    res.final_params = std::move(w);
    return res;
}

TrainingResult train_lm(const TrainingProblem& problem, std::span<const double> initial,
                        const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::LM, "train_lm");
    validate_spec(spec);

    TrainingResult res;
    res.final_params.assign(initial.begin(), initial.end());
    if (epochs == 0) return res;

    const std::size_t n = problem.param_count();
    std::vector<double> w(initial.begin(), initial.end());
    BestIterate best;

    Matrix jtj;
    std::vector<double> g, neg_g(n), delta, trial(n);
    double cur_sse = 0.0;
    auto refresh = [&](std::span<const double> at) -> bool {
        try {
            auto rj = problem.residual_jacobian(at);
            cur_sse = dot(rj.residuals, rj.residuals);
            jtj = gram(rj.jacobian);
            g = transpose_times(rj.jacobian, rj.residuals);
            return std::isfinite(cur_sse) && all_finite(g);
        } catch (const numerical_error&) {
            return false;
        }
    };

    if (!refresh(w)) {
        res.termination = Termination::numerical_failure;
        return res;
    }
    best.observe(w, cur_sse);

    double mu = spec.mu_init();
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        if (is_converged(cur_sse, g)) {
            res.termination = Termination::converged;
            break;
        }
        if (mu > kMuCollapse) {  // damping blew up: no usable step remains
            res.termination = Termination::converged;
            break;
        }

        Matrix a = jtj;
        for (std::size_t i = 0; i < n; ++i) {
            a(i, i) += mu;
            neg_g[i] = -g[i];
        }
        if (!solve_spd(std::move(a), neg_g, delta)) {
            mu *= kMuFactor;  // singular even with damping: raise and retry
            res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
            continue;
        }

        for (std::size_t j = 0; j < n; ++j) trial[j] = w[j] + delta[j];
        double trial_sse = std::numeric_limits<double>::infinity();
        if (all_finite(trial)) {
            try {
                trial_sse = problem.sse(trial);
            } catch (const numerical_error&) {
                trial_sse = std::numeric_limits<double>::infinity();
            }
        }

        if (trial_sse < cur_sse) {
            std::swap(w, trial);
            mu = std::max(mu / kMuFactor, kMuFloor);
            if (!refresh(w)) {
                res.termination = Termination::numerical_failure;
                w = best.params;
                break;
            }
            best.observe(w, cur_sse);
        } else {
            mu *= kMuFactor;  // step discarded
        }
        res.epoch_rmse.push_back(to_rmse(cur_sse, problem.pattern_count()));
    }

    if (res.termination == Termination::budget_exhausted && is_converged(cur_sse, g))
        res.termination = Termination::converged;
    res.epochs_used = res.epoch_rmse.size();
    res.final_params = std::move(w);
    return res;
}

TrainingResult train(const TrainingProblem& problem, std::span<const double> initial,
                     const TrainerSpec& spec, std::size_t epochs) {
    switch (spec.kind) {
        case TrainerKind::BP: return train_bp(problem, initial, spec, epochs);
        case TrainerKind::SCG: return train_scg(problem, initial, spec, epochs);
        case TrainerKind::QNA: return train_qna(problem, initial, spec, epochs);
        case TrainerKind::LM: return train_lm(problem, initial, spec, epochs);
    }
    throw std::invalid_argument("train: unknown trainer kind");
}

namespace {

TrainingResult train_net(const NetworkPhenotype& net, const EvaluationBatch& batch,
                         const TrainerSpec& spec, std::size_t epochs) {
    validate_network(net);
    NetworkProblem problem(shape_of(net), batch);
    return train(problem, flatten_params(net), spec, epochs);
}

}  // namespace

TrainingResult train_bp(const NetworkPhenotype& net, const EvaluationBatch& batch,
                        const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::BP, "train_bp");
    return train_net(net, batch, spec, epochs);
}
TrainingResult train_scg(const NetworkPhenotype& net, const EvaluationBatch& batch,
                         const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::SCG, "train_scg");
    return train_net(net, batch, spec, epochs);
}
TrainingResult train_qna(const NetworkPhenotype& net, const EvaluationBatch& batch,
                         const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::QNA, "train_qna");
    return train_net(net, batch, spec, epochs);
}
TrainingResult train_lm(const NetworkPhenotype& net, const EvaluationBatch& batch,
                        const TrainerSpec& spec, std::size_t epochs) {
    expect_kind(spec, TrainerKind::LM, "train_lm");
    return train_net(net, batch, spec, epochs);
}
TrainingResult train(const NetworkPhenotype& net, const EvaluationBatch& batch,
                     const TrainerSpec& spec, std::size_t epochs) {
    return train_net(net, batch, spec, epochs);
}

std::optional<std::vector<double>> lm_step(const TrainingProblem& problem,
                                           std::span<const double> params, double mu) {
    auto rj = problem.residual_jacobian(params);
    Matrix a = gram(rj.jacobian);
    auto g = transpose_times(rj.jacobian, rj.residuals);
    std::vector<double> b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        a(i, i) += mu;
        b[i] = -g[i];
    }
    std::vector<double> delta;
    if (!solve_spd(std::move(a), b, delta)) return std::nullopt;
    return delta;
}

}  // namespace eann
