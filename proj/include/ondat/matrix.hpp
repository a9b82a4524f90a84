#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ondat {

/// Dense row-major matrix of doubles. Just enough for the forecaster.
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

	std::size_t rows() const {
		return rows_;
	}
	std::size_t cols() const {
		return cols_;
	}
	bool empty() const {
		return data_.empty();
	}

	double& operator()(std::size_t r, std::size_t c) {
		return data_[r * cols_ + c];
	}
	double operator()(std::size_t r, std::size_t c) const {
		return data_[r * cols_ + c];
	}

	double* row(std::size_t r) {
		return data_.data() + r * cols_;
	}
	const double* row(std::size_t r) const {
		return data_.data() + r * cols_;
	}

	std::vector<double>& data() {
		return data_;
	}
	const std::vector<double>& data() const {
		return data_;
	}

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

// C = A (n,k) * B (k,m)
inline Matrix matmul(const Matrix& a, const Matrix& b) {
	if (a.cols() != b.rows()) {
		throw std::invalid_argument("matmul: shape mismatch");
	}
	Matrix c(a.rows(), b.cols());
	for (std::size_t i = 0; i < a.rows(); ++i) {
		const double* ai = a.row(i);
		double* ci = c.row(i);
		for (std::size_t k = 0; k < a.cols(); ++k) {
			const double aik = ai[k];
			const double* bk = b.row(k);
			for (std::size_t j = 0; j < b.cols(); ++j) {
				ci[j] += aik * bk[j];
			}
		}
	}
	return c;
}

// C = A^T (k,n)^T=(n,k) ... a is (n,k), b is (n,m), result (k,m).
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
	if (a.rows() != b.rows()) {
		throw std::invalid_argument("matmul_at_b: shape mismatch");
	}
	Matrix c(a.cols(), b.cols());
	for (std::size_t n = 0; n < a.rows(); ++n) {
		const double* an = a.row(n);
		const double* bn = b.row(n);
		for (std::size_t i = 0; i < a.cols(); ++i) {
			const double ani = an[i];
			double* ci = c.row(i);
			for (std::size_t j = 0; j < b.cols(); ++j) {
				ci[j] += ani * bn[j];
			}
		}
	}
	return c;
}

// C = A (n,m) * B^T where b is (k,m); result (n,k).
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
	if (a.cols() != b.cols()) {
		throw std::invalid_argument("matmul_a_bt: shape mismatch");
	}
	Matrix c(a.rows(), b.rows());
	for (std::size_t i = 0; i < a.rows(); ++i) {
		const double* ai = a.row(i);
		double* ci = c.row(i);
		for (std::size_t j = 0; j < b.rows(); ++j) {
			const double* bj = b.row(j);
			double s = 0.0;
			for (std::size_t k = 0; k < a.cols(); ++k) {
				s += ai[k] * bj[k];
			}
			ci[j] = s;
		}
	}
	return c;
}

} // namespace ondat
