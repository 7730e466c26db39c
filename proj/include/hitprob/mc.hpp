#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace hitprob::mc {

/// How the sample loop runs. Serial is the reference implementation used by
/// the tests and the benchmark; OpenMP must produce bit-identical results
/// for any thread count, which the blockwise reduction below guarantees.
enum class Exec { Serial, OpenMP };

inline constexpr std::int64_t kBlockSize = 8192;

struct IndicatorSample {
    bool inside = false;
    bool near_boundary = false;
};

struct BinaryTally {
    std::int64_t inside = 0;
    std::int64_t boundary = 0;
    std::int64_t samples = 0;
};

struct MomentSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t samples = 0;

    double mean() const { return samples > 0 ? sum / static_cast<double>(samples) : 0.0; }
    double variance() const {
        if (samples < 2) return 0.0;
        const double n = static_cast<double>(samples);
        const double v = (sum_sq - sum * sum / n) / (n - 1.0);
        return v > 0.0 ? v : 0.0;
    }
    double std_error() const {
        return samples > 0 ? std::sqrt(variance() / static_cast<double>(samples)) : 0.0;
    }
};

namespace detail {

/// Deterministic pairwise reduction of per-block partial sums; the result
/// depends only on the block partition, never on thread count.
double pairwise_sum(const double* data, std::int64_t count);

std::int64_t num_blocks(std::int64_t samples);
void block_range(std::int64_t block, std::int64_t samples, std::int64_t& begin, std::int64_t& end);

}  // namespace detail

/// Counts indicator hits over sample indices [0, samples). Integer
/// accumulation is exact, so any execution order gives the same tally.
template <class F>
BinaryTally tally_indicator(std::int64_t samples, Exec exec, F&& per_sample) {
    BinaryTally tally;
    tally.samples = samples;
    std::int64_t inside = 0, boundary = 0;
    if (exec == Exec::Serial) {
        for (std::int64_t i = 0; i < samples; ++i) {
            const IndicatorSample s = per_sample(i);
            inside += s.inside ? 1 : 0;
            boundary += s.near_boundary ? 1 : 0;
        }
    } else {
#pragma omp parallel for schedule(static) reduction(+ : inside, boundary)
        for (std::int64_t i = 0; i < samples; ++i) {
            const IndicatorSample s = per_sample(i);
            inside += s.inside ? 1 : 0;
            boundary += s.near_boundary ? 1 : 0;
        }
    }
    tally.inside = inside;
    tally.boundary = boundary;
    return tally;
}

/// Accumulates sum and sum of squares of a per-sample statistic with a
/// fixed block partition: blocks are summed sequentially, block results are
/// combined pairwise in index order. Serial and OpenMP paths are
/// bit-identical.
template <class F>
MomentSums accumulate_moments(std::int64_t samples, Exec exec, F&& per_sample) {
    MomentSums out;
    out.samples = samples;
    if (samples <= 0) return out;

    const std::int64_t nb = detail::num_blocks(samples);
    std::vector<double> bsum(static_cast<std::size_t>(nb));
    std::vector<double> bsq(static_cast<std::size_t>(nb));

    const auto run_block = [&](std::int64_t blk) {
        std::int64_t begin, end;
        detail::block_range(blk, samples, begin, end);
        double s = 0.0, q = 0.0;
        for (std::int64_t i = begin; i < end; ++i) {
            const double y = per_sample(i);
            s += y;
            q += y * y;
        }
        bsum[static_cast<std::size_t>(blk)] = s;
        bsq[static_cast<std::size_t>(blk)] = q;
    };

    if (exec == Exec::Serial) {
        for (std::int64_t blk = 0; blk < nb; ++blk) run_block(blk);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t blk = 0; blk < nb; ++blk) run_block(blk);
    }

    out.sum = detail::pairwise_sum(bsum.data(), nb);
    out.sum_sq = detail::pairwise_sum(bsq.data(), nb);
    return out;
}

}  // namespace hitprob::mc
