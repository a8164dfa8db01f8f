#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mmfso/tag.hpp"

namespace mmfso {

struct Estimate {
    double mean = 0.0;
    double half_width_95 = 0.0;
    std::uint64_t n = 0;
    Tag tag = Tag::Analytic;

    static Estimate exact(double value, Tag tag = Tag::Analytic) { return {value, 0.0, 0, tag}; }
};

struct RngSpec {
    std::uint64_t seed = 1;
    std::uint64_t stream_id = 0;
};

using Rng = std::mt19937_64;

// Generator for one chunk of one stream. Depends only on (seed, stream_id,
// chunk), never on which worker runs the chunk.
Rng chunk_rng(const RngSpec& spec, std::uint64_t chunk);

// Welford running moments with Chan's pairwise merge.
class MomentAccumulator {
public:
    void add(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const MomentAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    // Unbiased sample variance.
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    Estimate estimate() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct McOptions {
    std::uint64_t chunk_size = 1u << 14;
    unsigned workers = 0;  // 0: MMFSO_WORKERS or hardware concurrency
    std::string context;   // echoed in error messages
};

// Worker count from the MMFSO_WORKERS environment variable, falling back to
// the hardware concurrency.
unsigned default_workers();

// Fills `out` (size = number of metrics) with one sample of each metric.
using MultiMetric = std::function<void(Rng&, double* out)>;
using Metric = std::function<double(Rng&)>;

std::vector<Estimate> estimate_many(const MultiMetric& metric, std::size_t count,
                                    std::uint64_t n, const RngSpec& rng,
                                    const McOptions& opts = {});

Estimate estimate(const Metric& metric, std::uint64_t n, const RngSpec& rng,
                  const McOptions& opts = {});

}  // namespace mmfso
