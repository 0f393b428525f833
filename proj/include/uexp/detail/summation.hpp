#pragma once

#include <cmath>

namespace uexp::detail {

// Neumaier's variant of Kahan summation.
template <typename T>
class CompensatedSum {
public:
    void add(T x) noexcept {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(T x) noexcept {
        add(x);
        return *this;
    }

    T value() const noexcept { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

}  // namespace uexp::detail
