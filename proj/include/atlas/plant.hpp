#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "atlas/core.hpp"

namespace atlas {

struct PlantSignature {
    Eigen::Index n_in = 0;
    Eigen::Index n_ctrl = 0;
    Eigen::Index n_out = 0;
    Box input_domain;    // n_in dimensions
    Box control_domain;  // n_ctrl dimensions

    void validate() const;
};

// Thread-safe count of plant evaluations with a hard cap.
class EvalCounter {
public:
    static constexpr std::uint64_t kUnlimited = ~0ull;

    explicit EvalCounter(std::uint64_t budget = kUnlimited) : budget_(budget) {}

    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    std::uint64_t budget() const { return budget_.load(std::memory_order_relaxed); }
    void set_budget(std::uint64_t b) { budget_.store(b, std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

    // Throws BudgetExhausted once the cap is reached; never overshoots it.
    void consume_one();

private:
    std::atomic<std::uint64_t> count_{0};
    std::atomic<std::uint64_t> budget_;
};

// Deterministic mapping (input, control) -> output. Immutable after
// construction; safe to evaluate from many threads. Only the eval counter
// mutates, atomically.
class Plant {
public:
    Plant(PlantSignature sig, std::string id);
    virtual ~Plant() = default;
    Plant(const Plant&) = delete;
    Plant& operator=(const Plant&) = delete;

    const PlantSignature& signature() const { return sig_; }
    const std::string& id() const { return id_; }

    // Checks dimensions and domains, charges the counter, then evaluates.
    Vec evaluate(const Vec& x, const Vec& c) const;

    std::uint64_t evals_used() const { return counter_.count(); }
    std::uint64_t eval_budget() const { return counter_.budget(); }
    void set_eval_budget(std::uint64_t b) { counter_.set_budget(b); }
    void reset_eval_count() { counter_.reset(); }

protected:
    virtual Vec eval_impl(const Vec& x, const Vec& c) const = 0;

private:
    PlantSignature sig_;
    std::string id_;
    mutable EvalCounter counter_;
};

using PlantPtr = std::shared_ptr<Plant>;

// y = A x + B c + bias. The acceptable input set for a fixed control and a
// box output bound is the exact polytope {x : lo <= A x + B c + bias <= hi}.
PlantPtr make_affine_plant(const Mat& A, const Mat& B, const Vec& bias,
                           Box input_domain, Box control_domain);

// Scalar y = sum_i w_i (x_i - center_i)^2 + control_offset(c). For bound
// y <= h the acceptable region is an exact ellipsoid with cutoff radius
// sqrt((h - control_offset(c)) / sum_i w_i u_i^2) along unit direction u.
PlantPtr make_ellipsoidal_plant(const Vec& center, const Vec& weights,
                                std::function<double(const Vec&)> control_offset,
                                Box input_domain, Box control_domain);

// Smooth saturating load/delay network stand-in: 31 inputs, 43 controls,
// one output. Same seed yields an identical plant. Output is monotone
// increasing in every input, so x = 0 is the zero-load baseline.
PlantPtr make_network_analog(std::uint64_t seed);

// Scalar y = | ||x|| - 1 |; under bound y <= 0.25 the acceptable set is the
// annulus 0.75 <= ||x|| <= 1.25. The center of the ring is unacceptable,
// which makes this the hole-detection fixture.
PlantPtr make_annulus_plant(int dim = 2);

} // namespace atlas
