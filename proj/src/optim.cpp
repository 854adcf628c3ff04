#include "sfvq/optim.hpp"

#include <cmath>
#include <string>

#include "sfvq/errors.hpp"

namespace sfvq {

AdamState make_adam_state(std::size_t param_count, double beta1, double beta2,
                          double epsilon) {
    AdamState s;
    s.first_moment.assign(param_count, 0.0);
    s.second_moment.assign(param_count, 0.0);
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, double lr) {
    const std::size_t n = state.first_moment.size();
    if (params.size() != n || grads.size() != n)
        throw DimensionError("adam_step: parameter/gradient size mismatch (state " +
                             std::to_string(n) + ", params " +
                             std::to_string(params.size()) + ", grads " +
                             std::to_string(grads.size()) + ")");
    for (double g : grads)
        if (!std::isfinite(g))
            throw NumericError("adam_step: non-finite gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < n; ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        const double g = grads[i];
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

LrSchedule default_schedule(double base_lr, long long stage_batches) {
    LrSchedule s;
    s.base_lr = base_lr;
    s.stage_batches = stage_batches;
    const long long p60 = (stage_batches * 6) / 10;
    const long long p80 = (stage_batches * 8) / 10;
    if (p60 > 0 && p60 < stage_batches)
        s.halve_points.push_back(p60);
    if (p80 > p60 && p80 < stage_batches)
        s.halve_points.push_back(p80);
    return s;
}

double lr_at(const LrSchedule& schedule, long long batch_in_stage) {
    if (schedule.base_lr <= 0.0)
        throw InvalidArgument("lr_at: base_lr must be positive");
    if (schedule.stage_batches <= 0)
        throw InvalidArgument("lr_at: stage_batches must be positive");
    long long prev = -1;
    for (long long p : schedule.halve_points) {
        if (p <= prev || p >= schedule.stage_batches)
            throw InvalidArgument("lr_at: halve points must be strictly increasing "
                                  "and less than stage_batches");
        prev = p;
    }
    if (batch_in_stage < 0 || batch_in_stage >= schedule.stage_batches)
        throw InvalidArgument("lr_at: batch index " + std::to_string(batch_in_stage) +
                              " outside stage of " +
                              std::to_string(schedule.stage_batches) + " batches");
    double lr = schedule.base_lr;
    for (long long p : schedule.halve_points)
        if (p <= batch_in_stage)
            lr *= 0.5;
    return lr;
}

} // namespace sfvq
