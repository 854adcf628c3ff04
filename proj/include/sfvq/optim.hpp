#ifndef SFVQ_OPTIM_HPP
#define SFVQ_OPTIM_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace sfvq {

/// Adam accumulators for a flat parameter vector.
struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam_state(std::size_t param_count, double beta1 = 0.9,
                          double beta2 = 0.999, double epsilon = 1e-8);

// One bias-corrected Adam update, in place. params and grads must match the
// state's parameter count; grads must be finite.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, double lr);

/// Staged learning-rate schedule: the base rate is halved at each listed
/// batch index, and the whole schedule restarts at every recursion stage.
struct LrSchedule {
    double base_lr = 1e-3;
    long long stage_batches = 100000;
    std::vector<long long> halve_points; // strictly increasing, < stage_batches
};

// Halve at 60% and 80% of the stage.
LrSchedule default_schedule(double base_lr, long long stage_batches);

// base_lr * 2^-k where k counts halve points at or before batch_in_stage.
double lr_at(const LrSchedule& schedule, long long batch_in_stage);

} // namespace sfvq

#endif
