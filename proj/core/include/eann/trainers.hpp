#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "eann/objective.hpp"

namespace eann {

enum class TrainerKind : std::uint8_t { BP = 0, SCG = 1, QNA = 2, LM = 3 };

inline constexpr std::size_t kTrainerKindCount = 4;
inline constexpr std::array<TrainerKind, kTrainerKindCount> kAllTrainerKinds = {
    TrainerKind::BP, TrainerKind::SCG, TrainerKind::QNA, TrainerKind::LM};

std::string_view trainer_tag(TrainerKind kind);
std::optional<TrainerKind> parse_trainer_tag(std::string_view tag);

struct ParamRange {
    std::string_view name;
    double lo;
    double hi;
};

// Evolvable hyperparameter ranges, closed intervals.
std::span<const ParamRange> trainer_param_ranges(TrainerKind kind);
std::size_t trainer_param_count(TrainerKind kind);

// A concrete trainer choice. `params` holds the kind's hyperparameters in
// the order of trainer_param_ranges(kind); slots past that count are
// ignored.
struct TrainerSpec {
    TrainerKind kind = TrainerKind::BP;
    std::array<double, 4> params{};

    // BP
    double learning_rate() const { return params[0]; }
    double momentum() const { return params[1]; }
    // SCG
    double sigma() const { return params[0]; }
    double lambda_init() const { return params[1]; }
    // QNA
    double initial_step() const { return params[0]; }
    double max_rel_step() const { return params[1]; }
    double armijo_c() const { return params[2]; }
    double contraction() const { return params[3]; }
    // LM
    double mu_init() const { return params[0]; }
};

bool operator==(const TrainerSpec& a, const TrainerSpec& b);

// Range midpoints; a reasonable fixed setting when nothing evolves them.
TrainerSpec default_spec(TrainerKind kind);

// Throws std::invalid_argument when a used hyperparameter falls outside
// its closed range.
void validate_spec(const TrainerSpec& spec);

enum class Termination : std::uint8_t { budget_exhausted, converged, numerical_failure };

std::string_view termination_tag(Termination t);

struct TrainingResult {
    std::vector<double> final_params;
    std::vector<double> epoch_rmse;  // RMSE after each completed epoch
    std::size_t epochs_used = 0;
    Termination termination = Termination::budget_exhausted;
    // Diagnostics: steepest-descent restarts (SCG) or identity resets (QNA),
    // and curvature-skipped BFGS updates (QNA).
    std::size_t restarts = 0;
    std::size_t skipped_updates = 0;
};

// Early-exit thresholds shared by all trainers.
inline constexpr double kGradTolerance = 1e-10;  // infinity norm of d(sse/2)/dw
inline constexpr double kSseTolerance = 1e-14;

TrainingResult train_bp(const TrainingProblem& problem, std::span<const double> initial,
                        const TrainerSpec& spec, std::size_t epochs);
TrainingResult train_scg(const TrainingProblem& problem, std::span<const double> initial,
                         const TrainerSpec& spec, std::size_t epochs);
TrainingResult train_qna(const TrainingProblem& problem, std::span<const double> initial,
                         const TrainerSpec& spec, std::size_t epochs);
TrainingResult train_lm(const TrainingProblem& problem, std::span<const double> initial,
                        const TrainerSpec& spec, std::size_t epochs);

// Dispatch on spec.kind.
TrainingResult train(const TrainingProblem& problem, std::span<const double> initial,
                     const TrainerSpec& spec, std::size_t epochs);

// Network-level entry points; the network supplies both shape and the
// initial flat parameters.
TrainingResult train_bp(const NetworkPhenotype& net, const EvaluationBatch& batch,
                        const TrainerSpec& spec, std::size_t epochs);
TrainingResult train_scg(const NetworkPhenotype& net, const EvaluationBatch& batch,
                         const TrainerSpec& spec, std::size_t epochs);
TrainingResult train_qna(const NetworkPhenotype& net, const EvaluationBatch& batch,
                         const TrainerSpec& spec, std::size_t epochs);
TrainingResult train_lm(const NetworkPhenotype& net, const EvaluationBatch& batch,
                        const TrainerSpec& spec, std::size_t epochs);
TrainingResult train(const NetworkPhenotype& net, const EvaluationBatch& batch,
                     const TrainerSpec& spec, std::size_t epochs);

// One damped Gauss-Newton step at fixed mu: solves (J^T J + mu I) d = -J^T e
// at `params`. Empty when the damped system is still singular.
std::optional<std::vector<double>> lm_step(const TrainingProblem& problem,
                                           std::span<const double> params, double mu);

}  // namespace eann
