#include "uexp/sample.hpp"

#include <cmath>
#include <string>

#include "uexp/detail/summation.hpp"
#include "uexp/errors.hpp"

namespace uexp {

double compensated_mean(std::span<const double> values) {
    detail::CompensatedSum<double> sum;
    for (double v : values) {
        sum += v;
    }
    return sum.value() / static_cast<double>(values.size());
}

Sample::Sample(std::vector<double> observations) : observations_(std::move(observations)) {
    if (observations_.empty()) {
        throw InputError("sample must contain at least one observation");
    }
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const double x = observations_[i];
        if (!std::isfinite(x) || !(x > 0.0)) {
            throw InputError("observation " + std::to_string(i) +
                             " is not a finite positive number");
        }
    }
    mean_ = compensated_mean(observations_);
}

}  // namespace uexp
