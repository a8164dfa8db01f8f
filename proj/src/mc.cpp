#include "mmfso/mc.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

const char* to_string(Tag tag) {
    switch (tag) {
        case Tag::Analytic: return "analytic";
        case Tag::NumericFallback: return "numeric-fallback";
        case Tag::MonteCarlo: return "monte-carlo";
    }
    return "unknown";
}

Rng chunk_rng(const RngSpec& spec, std::uint64_t chunk) {
    const std::uint64_t a = splitmix64(spec.seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(spec.stream_id + 0x632be59bd9b4e019ULL));
    const std::uint64_t c = splitmix64(b ^ splitmix64(chunk + 0x85157af5ULL));
    const std::uint64_t d = splitmix64(c);
    std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
    return Rng(seq);
}

void MomentAccumulator::merge(const MomentAccumulator& o) noexcept {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double delta = o.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += o.m2_ + delta * delta * na * nb / n;
    n_ += o.n_;
}

Estimate MomentAccumulator::estimate() const {
    Estimate e;
    e.mean = mean_;
    e.n = n_;
    e.tag = Tag::MonteCarlo;
    e.half_width_95 = n_ > 1 ? 1.96 * std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    return e;
}

unsigned default_workers() {
    if (const char* env = std::getenv("MMFSO_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::vector<Estimate> estimate_many(const MultiMetric& metric, std::size_t count,
                                    std::uint64_t n, const RngSpec& rng, const McOptions& opts) {
    if (n < 1000) throw ConfigError("Monte-Carlo estimate needs at least 1000 samples");
    if (count == 0) throw ConfigError("Monte-Carlo estimate needs at least one metric");
    const std::uint64_t chunk = opts.chunk_size > 0 ? opts.chunk_size : 1u << 14;
    const std::uint64_t chunks = (n + chunk - 1) / chunk;

    std::vector<std::vector<MomentAccumulator>> parts(chunks, std::vector<MomentAccumulator>(count));
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        std::vector<double> out(count);
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks || failed.load()) return;
            try {
                Rng gen = chunk_rng(rng, c);
                const std::uint64_t begin = c * chunk;
                const std::uint64_t end = std::min(n, begin + chunk);
                auto& acc = parts[c];
                for (std::uint64_t i = begin; i < end; ++i) {
                    metric(gen, out.data());
                    for (std::size_t k = 0; k < count; ++k) {
                        if (!std::isfinite(out[k])) {
                            std::ostringstream msg;
                            msg << "non-finite Monte-Carlo sample (metric " << k << ", sample " << i
                                << ", seed " << rng.seed << ", stream " << rng.stream_id << ")";
                            if (!opts.context.empty()) msg << " at " << opts.context;
                            throw NumericError(msg.str());
                        }
                        acc[k].add(out[k]);
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers ? opts.workers : default_workers(),
                                                             static_cast<unsigned>(chunks)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<Estimate> result(count);
    for (std::size_t k = 0; k < count; ++k) {
        MomentAccumulator total;
        for (std::uint64_t c = 0; c < chunks; ++c) total.merge(parts[c][k]);
        result[k] = total.estimate();
    }
    return result;
}

Estimate estimate(const Metric& metric, std::uint64_t n, const RngSpec& rng, const McOptions& opts) {
    return estimate_many([&](Rng& g, double* out) { out[0] = metric(g); }, 1, n, rng, opts).front();
}

}  // namespace mmfso
