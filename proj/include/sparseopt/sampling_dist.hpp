#pragma once

// Edge-weight distributions. TruncScaledExp(n, lambda) is n*Exp(1)
// conditioned to lie in [0, lambda]; it converges to Uniform(0, lambda).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparseopt/rng.hpp"

namespace sparseopt {

class WeightDist {
public:
    enum class Kind { Exp1, TruncScaledExp, Uniform };

    static WeightDist exp1() { return WeightDist(Kind::Exp1, 0.0, 0.0); }

    static WeightDist trunc_scaled_exp(double n, double lambda) {
        if (!(n > 0.0) || !(lambda > 0.0))
            throw std::invalid_argument("trunc_scaled_exp: need n > 0 and lambda > 0");
        return WeightDist(Kind::TruncScaledExp, n, lambda);
    }

    static WeightDist uniform(double lambda) {
        if (!(lambda > 0.0)) throw std::invalid_argument("uniform: need lambda > 0");
        return WeightDist(Kind::Uniform, 0.0, lambda);
    }

    Kind kind() const { return kind_; }
    double scale_n() const { return n_; }
    double lambda() const { return lambda_; }

    double sample(SplitMix64& rng) const {
        switch (kind_) {
            case Kind::Exp1:
                return rng.next_exp();
            case Kind::TruncScaledExp: {
                // Inverse CDF: x = -n ln(1 - u (1 - e^{-lambda/n})), exact on
                // [0, lambda]; clamp guards rounding at the right endpoint.
                double u = rng.next_unit();
                double x = -n_ * std::log1p(-u * (-std::expm1(-lambda_ / n_)));
                return std::min(x, lambda_);
            }
            case Kind::Uniform:
                return lambda_ * rng.next_unit();
        }
        throw std::logic_error("WeightDist: bad kind");
    }

    double cdf(double x) const {
        switch (kind_) {
            case Kind::Exp1:
                return x <= 0.0 ? 0.0 : -std::expm1(-x);
            case Kind::TruncScaledExp:
                if (x <= 0.0) return 0.0;
                if (x >= lambda_) return 1.0;
                return -std::expm1(-x / n_) / -std::expm1(-lambda_ / n_);
            case Kind::Uniform:
                if (x <= 0.0) return 0.0;
                if (x >= lambda_) return 1.0;
                return x / lambda_;
        }
        throw std::logic_error("WeightDist: bad kind");
    }

    // Supremum of the support; +inf for Exp1.
    double support_max() const {
        return kind_ == Kind::Exp1 ? std::numeric_limits<double>::infinity() : lambda_;
    }

private:
    WeightDist(Kind k, double n, double lambda) : kind_(k), n_(n), lambda_(lambda) {}

    Kind kind_;
    double n_;
    double lambda_;
};

} // namespace sparseopt
