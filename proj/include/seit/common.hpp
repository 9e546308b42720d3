#ifndef SEIT_COMMON_HPP
#define SEIT_COMMON_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace seit {

using Vec2 = Eigen::Vector2d;

// Violated precondition or inconsistent inputs (CLI exit code 1).
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure: non-convergence, degenerate geometry, ... (CLI exit code 2).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic uniform draws. std::uniform_real_distribution is
// implementation-defined, so the [0,1) mapping is spelled out here: the top
// 53 bits of a mt19937_64 word scaled by 2^-53.
class UniformSampler {
public:
    explicit UniformSampler(std::uint64_t seed) : state_(seed) {}

    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [a,b]; a == b is allowed and returns a exactly.
    double next(double a, double b) { return a + (b - a) * next_unit(); }

private:
    // mt19937_64 without <random> distribution wrappers.
    std::uint64_t next_u64() {
        if (index_ == kN) generate();
        std::uint64_t x = mt_[index_++];
        x ^= (x >> 29) & 0x5555555555555555ULL;
        x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
        x ^= (x << 37) & 0xFFF7EEE000000000ULL;
        x ^= x >> 43;
        return x;
    }

    static constexpr int kN = 312;
    std::uint64_t state_;
    std::uint64_t mt_[kN];
    int index_ = kN;
    bool seeded_ = false;

    void generate() {
        if (!seeded_) {
            mt_[0] = state_;
            for (int i = 1; i < kN; ++i)
                mt_[i] = 6364136223846793005ULL * (mt_[i - 1] ^ (mt_[i - 1] >> 62)) +
                         static_cast<std::uint64_t>(i);
            seeded_ = true;
        }
        constexpr int kM = 156;
        constexpr std::uint64_t kUpper = 0xFFFFFFFF80000000ULL;
        constexpr std::uint64_t kLower = 0x7FFFFFFFULL;
        for (int i = 0; i < kN; ++i) {
            std::uint64_t y = (mt_[i] & kUpper) | (mt_[(i + 1) % kN] & kLower);
            mt_[i] = mt_[(i + kM) % kN] ^ (y >> 1);
            if (y & 1) mt_[i] ^= 0xB5026F5AA96619E9ULL;
        }
        index_ = 0;
    }
};

// Per-purpose seeds derived from the master seed by fixed offsets.
struct SeedPlan {
    std::uint64_t master = 0;
    std::uint64_t sampling() const { return master + 1; }  // Monte Carlo contrasts
    std::uint64_t noise() const { return master + 2; }     // measurement noise matrix
};

namespace detail {
int& thread_count_ref();
}

// Global worker count for parallel_for (CLI --threads). 0 = hardware default.
void set_thread_count(int n);
int thread_count();

// Runs body(0..n-1) on a worker pool. Callers keep determinism by writing
// into per-index slots and reducing in index order afterwards.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace seit

#endif
