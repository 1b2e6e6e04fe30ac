#pragma once

// Small dense complex linear algebra: just what the estimators need.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mimodoa {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Complex> data() const noexcept { return data_; }
    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;
    /// Largest |A - A^H| entry.
    double hermitian_defect() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex s);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x);

/// x^H y.
Complex dot(std::span<const Complex> x, std::span<const Complex> y);
double norm(std::span<const Complex> x);
ComplexVector axpy(Complex alpha, std::span<const Complex> x, std::span<const Complex> y);

/// Kronecker product; entry (i * b.size() + l) is a[i] * b[l].
ComplexVector kron(std::span<const Complex> a, std::span<const Complex> b);

/// x^H R y. Throws DimensionMismatch unless R is square and sized to x, y.
Complex quad_form(std::span<const Complex> x, const ComplexMatrix& r, std::span<const Complex> y);

/// n x n cyclic down-shift: (L x)[0] = x[n-1], (L x)[i] = x[i-1].
ComplexMatrix down_shift_matrix(std::size_t n);

/// Applies the cyclic down-shift without forming the matrix.
ComplexVector down_shift(std::span<const Complex> x);

struct HermitianEigen {
    std::vector<double> values;  ///< descending
    ComplexMatrix vectors;       ///< column i pairs with values[i]
};

/// Eigendecomposition of (R + R^H) / 2. Throws DimensionMismatch for
/// non-square input and InvalidArgument when R is not Hermitian to 1e-9
/// relative.
HermitianEigen hermitian_eig(const ComplexMatrix& r);

}  // namespace mimodoa
