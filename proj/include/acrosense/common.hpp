#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace acrosense {

/// Bad inputs, malformed files, contract violations. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failures (non-convergence, Cholesky breakdown). CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Seeding and hashing

/// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combine a seed with a tag into a new seed (order-sensitive).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b);

/// FNV-1a 64-bit over a byte string. Stable across platforms.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::uint64_t fnv1a(const std::string& s);

/// 16-hex-digit lowercase rendering of a 64-bit hash.
std::string hash_hex(std::uint64_t h);

// ---------------------------------------------------------------------------
// Deterministic RNG
//
// mt19937_64 is bit-exact by the standard; every derived quantity below is
// computed with explicit arithmetic (not std:: distributions, whose output
// is implementation-defined), so streams are reproducible everywhere.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Log-uniform over [lo, hi], lo > 0.
    double log_uniform(double lo, double hi);

    /// Standard normal via Box-Muller (cosine branch only).
    double normal();

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

    /// A random permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Task parallelism
//
// Tasks must be independent and write to pre-allocated, disjoint slots so
// results do not depend on scheduling. The thread cap comes from
// ACROSENSE_THREADS (or hardware_concurrency) and can be overridden in-process.

namespace parallel {

int max_threads();
void set_max_threads(int n);

/// Run fn(i) for i in [0, n). Blocks until done. Rethrows the exception of
/// the lowest failing index if any task throws.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace parallel

// ---------------------------------------------------------------------------
// Number formatting for reports: fixed 17 significant digits.

std::string format_double(double v);

}  // namespace acrosense
