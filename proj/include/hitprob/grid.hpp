#pragma once

#include <cstddef>
#include <vector>

namespace hitprob {

/// Integration grid on [0,1]. Nodes are grouped into segments delimited by
/// the union of noise switch times and control breakpoints; each segment is
/// subdivided into an even number of equal steps so that one classical RK4
/// step per grid step and composite Simpson quadrature over the same nodes
/// share a single node set.
class TimeGrid {
public:
    /// switch_times must be strictly increasing with endpoints 0 and 1.
    /// control_breaks are merged in (values outside (0,1) and duplicates are
    /// ignored). steps_per_interval sets the resolution of each noise
    /// interval; segments get a proportional share, at least two steps.
    static TimeGrid build(const std::vector<double>& switch_times,
                          const std::vector<double>& control_breaks, int steps_per_interval);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<std::size_t>& switch_indices() const { return switch_indices_; }

    /// Node indices of segment boundaries (ascending, first 0, last nodes()-1).
    const std::vector<std::size_t>& segment_bounds() const { return segment_bounds_; }

    std::size_t num_noise_intervals() const { return switch_indices_.size() - 1; }
    double switch_time(std::size_t i) const { return nodes_[switch_indices_[i]]; }

    /// Index i in 0..N-1 of the noise interval [t_i, t_{i+1}) holding t;
    /// t = 1 belongs to the last interval.
    std::size_t noise_interval_at(double t) const;

private:
    std::vector<double> nodes_;
    std::vector<std::size_t> switch_indices_;
    std::vector<std::size_t> segment_bounds_;
};

}  // namespace hitprob
