#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "ondat/matrix.hpp"

namespace ondat::eval {

/// Floor for the SMAPE denominator; the raw formula is undefined when
/// forecast and actual are both zero.
constexpr double kSmapeEpsilon = 1e-8;

/// Symmetric mean absolute percentage error over all cells, as a fraction in
/// [0, 2]: mean of |forecast - actual| / max((|forecast| + |actual|)/2, eps).
/// Multiply by 100 for the percent form.
inline double smape(const Matrix& forecast, const Matrix& actual) {
	if (forecast.rows() != actual.rows() || forecast.cols() != actual.cols()) {
		throw std::invalid_argument("smape: shape mismatch");
	}
	if (forecast.rows() == 0 || forecast.cols() == 0) {
		throw std::invalid_argument("smape: empty input");
	}
	double total = 0.0;
	for (std::size_t r = 0; r < forecast.rows(); ++r) {
		for (std::size_t c = 0; c < forecast.cols(); ++c) {
			const double f = forecast(r, c);
			const double y = actual(r, c);
			const double denom = std::max(0.5 * (std::abs(f) + std::abs(y)), kSmapeEpsilon);
			total += std::abs(f - y) / denom;
		}
	}
	return total / double(forecast.rows() * forecast.cols());
}

} // namespace ondat::eval
