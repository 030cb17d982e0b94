#ifndef MAGHOP_LOGVALUE_HPP
#define MAGHOP_LOGVALUE_HPP

#include <cmath>
#include <limits>

namespace maghop {

// sign * exp(log_magnitude), for quantities far outside double range.
struct LogValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0; // -1, 0, +1

    static LogValue zero() { return {}; }
    static LogValue from(double x) {
        if (x == 0.0) return {};
        return {std::log(std::abs(x)), x > 0.0 ? 1 : -1};
    }
    static LogValue pos(double log_mag) { return {log_mag, 1}; }

    double value() const {
        return sign == 0 ? 0.0 : sign * std::exp(log_magnitude);
    }
    LogValue operator*(const LogValue& o) const {
        if (sign == 0 || o.sign == 0) return {};
        return {log_magnitude + o.log_magnitude, sign * o.sign};
    }
    LogValue operator/(const LogValue& o) const {
        return {log_magnitude - o.log_magnitude, sign * o.sign};
    }
};

// Accumulates sum(w_i * exp(e_i)), w_i of either sign, without overflow.
class LogAccumulator {
public:
    void add(double exponent, double weight) {
        if (weight == 0.0 || exponent == -std::numeric_limits<double>::infinity())
            return;
        if (exponent > shift_ + 40.0) rescale(exponent);
        sum_ += weight * std::exp(exponent - shift_);
    }
    LogValue result() const {
        if (sum_ == 0.0) return LogValue::zero();
        return {shift_ + std::log(std::abs(sum_)), sum_ > 0.0 ? 1 : -1};
    }

private:
    void rescale(double new_shift) {
        sum_ *= std::exp(shift_ - new_shift);
        shift_ = new_shift;
    }
    double shift_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

} // namespace maghop

#endif
