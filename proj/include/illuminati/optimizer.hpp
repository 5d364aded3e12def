#ifndef ILLUMINATI_OPTIMIZER_HPP
#define ILLUMINATI_OPTIMIZER_HPP

#include <cmath>

#include "linalg.hpp"

namespace illuminati {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction over a flat parameter vector.
class Adam {
public:
    Adam(Eigen::Index size, AdamOptions options) : options_(options), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

    void step(Eigen::Ref<Vector> params, const Vector& grad)
    {
        ++t_;
        m_ = options_.beta1 * m_ + (1.0 - options_.beta1) * grad;
        v_ = options_.beta2 * v_ + (1.0 - options_.beta2) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
        params.array() -= options_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + options_.epsilon);
    }

    [[nodiscard]] long steps() const noexcept { return t_; }

private:
    AdamOptions options_;
    Vector m_;
    Vector v_;
    long t_ = 0;
};

} // namespace illuminati

#endif // ILLUMINATI_OPTIMIZER_HPP
