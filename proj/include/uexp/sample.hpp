#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uexp {

/// Validated i.i.d. observations, immutable after construction.
///
/// Every observation is finite and strictly positive; the arithmetic mean is
/// cached at construction using compensated summation.
class Sample {
public:
    /// Throws InputError naming the offending index when an observation is
    /// non-positive or non-finite, or when the list is empty.
    explicit Sample(std::vector<double> observations);

    std::span<const double> observations() const noexcept { return observations_; }
    std::int64_t size() const noexcept { return static_cast<std::int64_t>(observations_.size()); }
    double mean() const noexcept { return mean_; }

private:
    std::vector<double> observations_;
    double mean_;
};

/// Compensated mean of a non-empty span.
double compensated_mean(std::span<const double> values);

}  // namespace uexp
