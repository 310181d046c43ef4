#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ovum {

/// Dense N-dimensional array of doubles in row-major order.
///
/// Shape is fixed at construction; reshaped() returns a new value with the
/// same data. Double storage keeps finite-difference gradient checks
/// meaningful at 1e-4 relative tolerance.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    /// Tensor with explicit contents; data length must equal product(shape).
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double value);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    /// New tensor with the same data and a different shape (sizes must match).
    Tensor reshaped(std::vector<std::size_t> new_shape) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// True if every entry is finite (no NaN/inf).
    bool all_finite() const;

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// "[2, 3, 3]" style rendering for error messages.
std::string shape_to_string(const std::vector<std::size_t>& shape);

/// Throws ShapeError naming both shapes unless they match.
void require_same_shape(const Tensor& a, const Tensor& b, const std::string& context);

/// Rounds every entry to the nearest binary32 value. Parameter tensors are
/// kept on this grid so the float32 checkpoint payload round-trips bit-exactly.
void round_to_float32(Tensor& t);

} // namespace ovum
