#ifndef ILLUMINATI_HARD_CONCRETE_HPP
#define ILLUMINATI_HARD_CONCRETE_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace illuminati {

struct HardConcreteConfig {
    double beta = 0.5;
    double stretch_low = -0.1;
    double stretch_high = 1.1;
    bool stochastic = true;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(beta > 0.0)) throw Error(ErrorCode::domain_error, "beta must be > 0");
        if (!(stretch_low < 0.0 && stretch_high > 1.0)) {
            throw Error(ErrorCode::domain_error, "stretch interval must satisfy low < 0 < 1 < high");
        }
    }
};

inline double sigmoid(double x)
{
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Importance score of a mask logit: sigmoid(m / beta).
inline double importance_from_mask(double logit, double beta) { return sigmoid(logit / beta); }

struct GateSample {
    double gate = 0.0;
    /// d gate / d logit; zero wherever the clamp is active.
    double d_gate_d_logit = 0.0;
};

/// Stretched, clamped binary-concrete gate. The stretch is oriented so that
/// larger logits give larger gates:
///   s = sigmoid((log u - log(1 - u) + m) / beta)
///   gate = clamp(s * (high - low) + low, 0, 1)
inline GateSample sample_hard_concrete(double logit, const HardConcreteConfig& cfg, double u)
{
    if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::domain_error, "u must lie in (0, 1), got " + std::to_string(u));
    const double width = cfg.stretch_high - cfg.stretch_low;
    const double s = sigmoid((std::log(u) - std::log1p(-u) + logit) / cfg.beta);
    const double stretched = s * width + cfg.stretch_low;
    GateSample out;
    if (stretched <= 0.0) {
        out.gate = 0.0;
    } else if (stretched >= 1.0) {
        out.gate = 1.0;
    } else {
        out.gate = stretched;
        out.d_gate_d_logit = width * s * (1.0 - s) / cfg.beta;
    }
    return out;
}

} // namespace illuminati

#endif // ILLUMINATI_HARD_CONCRETE_HPP
