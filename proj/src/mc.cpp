#include "hitprob/mc.hpp"

namespace hitprob::mc::detail {

double pairwise_sum(const double* data, std::int64_t count) {
    if (count == 0) return 0.0;
    if (count == 1) return data[0];
    const std::int64_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

std::int64_t num_blocks(std::int64_t samples) {
    return (samples + kBlockSize - 1) / kBlockSize;
}

void block_range(std::int64_t block, std::int64_t samples, std::int64_t& begin, std::int64_t& end) {
    begin = block * kBlockSize;
    end = begin + kBlockSize;
    if (end > samples) end = samples;
}

}  // namespace hitprob::mc::detail
