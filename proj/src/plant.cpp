#include "atlas/plant.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "atlas/rng.hpp"

namespace atlas {

void PlantSignature::validate() const {
    if (n_in < 1 || n_ctrl < 1 || n_out < 1) {
        throw DimensionMismatch("plant dimensions must all be >= 1");
    }
    if (input_domain.dim() != n_in) {
        throw DimensionMismatch("input domain dimension does not match n_in");
    }
    if (control_domain.dim() != n_ctrl) {
        throw DimensionMismatch("control domain dimension does not match n_ctrl");
    }
}

void EvalCounter::consume_one() {
    std::uint64_t cap = budget_.load(std::memory_order_relaxed);
    std::uint64_t cur = count_.load(std::memory_order_relaxed);
    do {
        if (cur >= cap) {
            throw BudgetExhausted("plant evaluation budget exhausted at " + std::to_string(cap));
        }
    } while (!count_.compare_exchange_weak(cur, cur + 1, std::memory_order_relaxed));
}

Plant::Plant(PlantSignature sig, std::string id) : sig_(std::move(sig)), id_(std::move(id)) {
    sig_.validate();
}

Vec Plant::evaluate(const Vec& x, const Vec& c) const {
    if (x.size() != sig_.n_in) {
        throw DimensionMismatch("input vector has dimension " + std::to_string(x.size()) +
                                ", plant expects " + std::to_string(sig_.n_in));
    }
    if (c.size() != sig_.n_ctrl) {
        throw DimensionMismatch("control vector has dimension " + std::to_string(c.size()) +
                                ", plant expects " + std::to_string(sig_.n_ctrl));
    }
    if (!sig_.input_domain.contains(x)) {
        throw DomainViolation("input point outside the declared input domain");
    }
    if (!sig_.control_domain.contains(c)) {
        throw DomainViolation("control point outside the declared control domain");
    }
    counter_.consume_one();
    return eval_impl(x, c);
}

namespace {

class AffinePlant final : public Plant {
public:
    AffinePlant(PlantSignature sig, Mat A, Mat B, Vec bias)
        : Plant(std::move(sig), "affine"), A_(std::move(A)), B_(std::move(B)),
          bias_(std::move(bias)) {}

protected:
    Vec eval_impl(const Vec& x, const Vec& c) const override { return A_ * x + B_ * c + bias_; }

private:
    Mat A_, B_;
    Vec bias_;
};

class EllipsoidalPlant final : public Plant {
public:
    EllipsoidalPlant(PlantSignature sig, Vec center, Vec weights,
                     std::function<double(const Vec&)> offset)
        : Plant(std::move(sig), "ellipsoidal"), center_(std::move(center)),
          weights_(std::move(weights)), offset_(std::move(offset)) {}

protected:
    Vec eval_impl(const Vec& x, const Vec& c) const override {
        Vec d = x - center_;
        double y = weights_.dot(d.cwiseProduct(d)) + offset_(c);
        Vec out(1);
        out[0] = y;
        return out;
    }

private:
    Vec center_, weights_;
    std::function<double(const Vec&)> offset_;
};

// Stable softplus with slope 8; smooth lower clamp for the slack terms.
double softplus8(double z) {
    constexpr double beta = 8.0;
    if (z >= 0.0) return z + std::log1p(std::exp(-beta * z)) / beta;
    return std::log1p(std::exp(beta * z)) / beta;
}

class NetworkAnalogPlant final : public Plant {
public:
    static constexpr int kInputs = 31;
    static constexpr int kControls = 43;
    static constexpr int kTerms = 32;

    explicit NetworkAnalogPlant(PlantSignature sig, std::uint64_t seed)
        : Plant(std::move(sig), "network-analog-" + std::to_string(seed)) {
        Rng rng(mix_seed(seed ^ 0x6e657477ull));
        load_w_ = Mat(kTerms, kInputs);
        alloc_w_ = Mat(kTerms, kControls);
        cap_base_ = Vec(kTerms);
        cap_gain_ = Vec(kTerms);
        floor_load_ = Vec(kTerms);
        mix_q_ = Vec(kTerms);
        for (int j = 0; j < kTerms; ++j) {
            double wsum = 0.0;
            for (int i = 0; i < kInputs; ++i) {
                double w = 0.2 + 0.8 * rng.uniform01();
                load_w_(j, i) = w;
                wsum += w;
            }
            load_w_.row(j) /= wsum;  // load in [0, 1] over the unit input box

            double asum = 0.0;
            for (int k = 0; k < kControls; ++k) {
                double a = rng.uniform01();
                a *= a;  // sparse-ish capacity coupling
                alloc_w_(j, k) = a;
                asum += a;
            }
            alloc_w_.row(j) /= asum;

            cap_base_[j] = 0.7 + 0.3 * rng.uniform01();
            cap_gain_[j] = 0.5 + 0.5 * rng.uniform01();
            floor_load_[j] = 0.02 + 0.05 * rng.uniform01();
            mix_q_[j] = 0.5 + rng.uniform01();
        }
        mix_q_ /= mix_q_.sum();
    }

protected:
    Vec eval_impl(const Vec& x, const Vec& c) const override {
        double y = 0.0;
        for (int j = 0; j < kTerms; ++j) {
            double load = load_w_.row(j).dot(x);
            double cap = cap_base_[j] + cap_gain_[j] * alloc_w_.row(j).dot(c);
            double eps = 0.05 * cap;
            double slack = eps + softplus8(cap - load - eps);
            y += mix_q_[j] * (floor_load_[j] + load) / slack;
        }
        Vec out(1);
        out[0] = y;
        return out;
    }

private:
    Mat load_w_, alloc_w_;
    Vec cap_base_, cap_gain_, floor_load_, mix_q_;
};

class AnnulusPlant final : public Plant {
public:
    explicit AnnulusPlant(PlantSignature sig)
        : Plant(std::move(sig), "annulus-" + std::to_string(signature().n_in) + "d") {}

protected:
    Vec eval_impl(const Vec& x, const Vec& /*c*/) const override {
        Vec out(1);
        out[0] = std::abs(x.norm() - 1.0);
        return out;
    }

private:
};

} // namespace

PlantPtr make_affine_plant(const Mat& A, const Mat& B, const Vec& bias, Box input_domain,
                           Box control_domain) {
    if (A.rows() != B.rows() || A.rows() != bias.size()) {
        throw DimensionMismatch("affine plant: A, B and bias row counts differ");
    }
    PlantSignature sig;
    sig.n_in = A.cols();
    sig.n_ctrl = B.cols();
    sig.n_out = A.rows();
    sig.input_domain = std::move(input_domain);
    sig.control_domain = std::move(control_domain);
    return std::make_shared<AffinePlant>(std::move(sig), A, B, bias);
}

PlantPtr make_ellipsoidal_plant(const Vec& center, const Vec& weights,
                                std::function<double(const Vec&)> control_offset,
                                Box input_domain, Box control_domain) {
    if (center.size() != weights.size()) {
        throw DimensionMismatch("ellipsoidal plant: center and weights dimensions differ");
    }
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) {
            throw DomainViolation("ellipsoidal plant weights must be positive");
        }
    }
    PlantSignature sig;
    sig.n_in = center.size();
    sig.n_ctrl = control_domain.dim();
    sig.n_out = 1;
    sig.input_domain = std::move(input_domain);
    sig.control_domain = std::move(control_domain);
    if (!control_offset) control_offset = [](const Vec&) { return 0.0; };
    return std::make_shared<EllipsoidalPlant>(std::move(sig), center, weights,
                                              std::move(control_offset));
}

PlantPtr make_network_analog(std::uint64_t seed) {
    PlantSignature sig;
    sig.n_in = NetworkAnalogPlant::kInputs;
    sig.n_ctrl = NetworkAnalogPlant::kControls;
    sig.n_out = 1;
    sig.input_domain = Box(Vec::Zero(sig.n_in), Vec::Ones(sig.n_in));
    sig.control_domain = Box(Vec::Zero(sig.n_ctrl), Vec::Ones(sig.n_ctrl));
    return std::make_shared<NetworkAnalogPlant>(std::move(sig), seed);
}

PlantPtr make_annulus_plant(int dim) {
    if (dim < 1) throw DimensionMismatch("annulus plant dimension must be >= 1");
    PlantSignature sig;
    sig.n_in = dim;
    sig.n_ctrl = 1;
    sig.n_out = 1;
    sig.input_domain = Box(Vec::Constant(dim, -2.0), Vec::Constant(dim, 2.0));
    sig.control_domain = Box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
    return std::make_shared<AnnulusPlant>(std::move(sig));
}

} // namespace atlas
