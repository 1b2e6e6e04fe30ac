#include "mimodoa/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mimodoa/errors.hpp"

namespace mimodoa {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionMismatch("matrix data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
    ComplexMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::hermitian_defect() const {
    if (!square()) throw DimensionMismatch("hermitian_defect needs a square matrix");
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DimensionMismatch("matrix sum of different shapes");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DimensionMismatch("matrix difference of different shapes");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product inner dimensions differ");
    ComplexMatrix m(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
        }
    return m;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product size mismatch");
    ComplexVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex s = 0.0;
        const auto r = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
    if (x.size() != y.size()) throw DimensionMismatch("dot product of different lengths");
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double norm(std::span<const Complex> x) {
    double s = 0.0;
    for (const auto& z : x) s += std::norm(z);
    return std::sqrt(s);
}

ComplexVector axpy(Complex alpha, std::span<const Complex> x, std::span<const Complex> y) {
    if (x.size() != y.size()) throw DimensionMismatch("axpy of different lengths");
    ComplexVector out(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
    return out;
}

ComplexVector kron(std::span<const Complex> a, std::span<const Complex> b) {
    ComplexVector out;
    out.reserve(a.size() * b.size());
    for (const auto& ai : a)
        for (const auto& bl : b) out.push_back(ai * bl);
    return out;
}

Complex quad_form(std::span<const Complex> x, const ComplexMatrix& r, std::span<const Complex> y) {
    if (!r.square() || r.rows() != x.size() || r.cols() != y.size()) {
        throw DimensionMismatch("quad_form: " + std::to_string(x.size()) + " / " +
                                std::to_string(r.rows()) + "x" + std::to_string(r.cols()) +
                                " / " + std::to_string(y.size()));
    }
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == Complex{}) continue;
        Complex ry = 0.0;
        const auto row = r.row(i);
        for (std::size_t j = 0; j < y.size(); ++j) ry += row[j] * y[j];
        s += std::conj(x[i]) * ry;
    }
    return s;
}

ComplexMatrix down_shift_matrix(std::size_t n) {
    if (n < 2) throw InvalidArgument("down_shift_matrix needs n >= 2");
    ComplexMatrix l(n, n);
    l(0, n - 1) = 1.0;
    for (std::size_t i = 1; i < n; ++i) l(i, i - 1) = 1.0;
    return l;
}

ComplexVector down_shift(std::span<const Complex> x) {
    if (x.size() < 2) throw InvalidArgument("down_shift needs length >= 2");
    ComplexVector out(x.size());
    out[0] = x.back();
    std::copy(x.begin(), x.end() - 1, out.begin() + 1);
    return out;
}

HermitianEigen hermitian_eig(const ComplexMatrix& r) {
    if (!r.square()) throw DimensionMismatch("hermitian_eig needs a square matrix");
    const std::size_t n = r.rows();

    double scale = 0.0;
    for (const auto& z : r.data()) scale = std::max(scale, std::abs(z));
    if (r.hermitian_defect() > 1e-9 * std::max(scale, 1.0))
        throw InvalidArgument("hermitian_eig: matrix is not Hermitian");

    Eigen::MatrixXcd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = 0.5 * (r(i, j) + std::conj(r(j, i)));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) throw Error("hermitian_eig: solver did not converge");

    // Eigen returns ascending order.
    HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = static_cast<Eigen::Index>(n - 1 - k);
        out.values[k] = solver.eigenvalues()(src);
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, k) = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
    }
    return out;
}

}  // namespace mimodoa
