#include "hitprob/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hitprob/errors.hpp"

namespace hitprob {

TimeGrid TimeGrid::build(const std::vector<double>& switch_times,
                         const std::vector<double>& control_breaks, int steps_per_interval) {
    if (switch_times.size() < 2) throw ValidationError("switch_times: need at least {0, 1}");
    if (switch_times.front() != 0.0 || switch_times.back() != 1.0)
        throw ValidationError("switch_times: must start at 0 and end at 1");
    for (std::size_t i = 1; i < switch_times.size(); ++i)
        if (!(switch_times[i] > switch_times[i - 1]))
            throw ValidationError("switch_times: not strictly increasing");
    if (steps_per_interval < 2) throw ValidationError("steps_per_interval: must be >= 2");

    // Breakpoints: switch times plus interior control breakpoints.
    std::vector<double> breaks = switch_times;
    for (double t : control_breaks)
        if (t > 0.0 && t < 1.0) breaks.push_back(t);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    TimeGrid grid;
    grid.nodes_.push_back(0.0);
    grid.segment_bounds_.push_back(0);
    grid.switch_indices_.push_back(0);

    std::size_t next_switch = 1;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        // Noise interval containing this segment.
        while (next_switch < switch_times.size() && switch_times[next_switch] <= a) ++next_switch;
        const double interval_len =
            switch_times[next_switch] - switch_times[next_switch - 1];

        const double share = 0.5 * steps_per_interval * (b - a) / interval_len;
        const std::size_t half_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(share - 1e-12)));
        const std::size_t n_sub = 2 * half_steps;

        for (std::size_t k = 1; k < n_sub; ++k)
            grid.nodes_.push_back(a + static_cast<double>(k) * (b - a) / static_cast<double>(n_sub));
        grid.nodes_.push_back(b);  // breakpoint kept bitwise
        grid.segment_bounds_.push_back(grid.nodes_.size() - 1);
        if (next_switch < switch_times.size() && b == switch_times[next_switch])
            grid.switch_indices_.push_back(grid.nodes_.size() - 1);
    }

    return grid;
}

std::size_t TimeGrid::noise_interval_at(double t) const {
    const std::size_t n = num_noise_intervals();
    for (std::size_t i = 1; i < n; ++i)
        if (t < switch_time(i)) return i - 1;
    return n - 1;
}

}  // namespace hitprob
