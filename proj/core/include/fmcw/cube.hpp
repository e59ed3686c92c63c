#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fmcw {

using cplx = std::complex<double>;

/// Dense 4-D array with the first index varying fastest.
template <class T>
class Array4 {
public:
    using Dims = std::array<std::size_t, 4>;

    Array4() = default;
    explicit Array4(Dims dims, T fill = T{})
        : dims_(dims), data_(dims[0] * dims[1] * dims[2] * dims[3], fill) {}

    const Dims& dims() const noexcept { return dims_; }
    std::size_t dim(std::size_t axis) const { return dims_[axis]; }
    std::size_t size() const noexcept { return data_.size(); }

    std::size_t offset(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const noexcept {
        return i0 + dims_[0] * (i1 + dims_[1] * (i2 + dims_[2] * i3));
    }

    T& operator()(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) noexcept {
        return data_[offset(i0, i1, i2, i3)];
    }
    const T& operator()(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const noexcept {
        return data_[offset(i0, i1, i2, i3)];
    }

    /// Contiguous run along the first axis.
    std::span<T> line(std::size_t i1, std::size_t i2, std::size_t i3) {
        return {data_.data() + offset(0, i1, i2, i3), dims_[0]};
    }
    std::span<const T> line(std::size_t i1, std::size_t i2, std::size_t i3) const {
        return {data_.data() + offset(0, i1, i2, i3), dims_[0]};
    }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Array4&) const = default;

private:
    Dims dims_{0, 0, 0, 0};
    std::vector<T> data_;
};

using ComplexCube = Array4<cplx>;

}  // namespace fmcw
