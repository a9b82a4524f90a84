#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ondat::decomp {

namespace detail {

inline void check_loess_args(std::span<const double> x, std::span<const double> y, int window, int degree,
							 std::span<const double> robustness) {
	if (x.size() != y.size() || x.size() < 2) {
		throw std::invalid_argument("loess: x and y must have equal length >= 2");
	}
	if (window < 3) {
		throw std::invalid_argument("loess: window must be >= 3");
	}
	if (degree != 0 && degree != 1) {
		throw std::invalid_argument("loess: degree must be 0 or 1");
	}
	if (!robustness.empty() && robustness.size() != x.size()) {
		throw std::invalid_argument("loess: robustness weights must match x length");
	}
	for (std::size_t i = 1; i < x.size(); ++i) {
		if (x[i] < x[i - 1]) {
			throw std::invalid_argument("loess: x must be non-decreasing");
		}
	}
}

/// Inclusive index range [left, right] of the min(window, n) data points
/// nearest to xs, grown greedily from the insertion point.
inline std::pair<std::size_t, std::size_t> nearest_window(std::span<const double> x, int window, double xs) {
	const std::size_t n = x.size();
	const std::size_t len = std::min<std::size_t>(std::size_t(window), n);
	std::size_t left = std::size_t(std::lower_bound(x.begin(), x.end(), xs) - x.begin());
	std::size_t right = left;
	for (std::size_t taken = 0; taken < len; ++taken) {
		if (right >= n || (left > 0 && xs - x[left - 1] <= x[right] - xs)) {
			--left;
		} else {
			++right;
		}
	}
	return {left, right - 1};
}

/// Local weighted fit at xs over the window [left, right]. Tricube distance
/// weights with the near/far clipping thresholds at 0.1% and 99.9% of the
/// bandwidth; a degree-1 fit falls back to the weighted mean when the local
/// design is near singular.
inline double fit_at(std::span<const double> x, std::span<const double> y, int window, int degree,
					 std::span<const double> robustness, double xs, std::size_t left, std::size_t right) {
	const std::size_t n = x.size();
	const double range = x[n - 1] - x[0];
	double h = std::max(xs - x[left], x[right] - xs);
	if (std::size_t(window) > n) {
		// Pretend the extra points exist beyond the ends at average spacing.
		h += double(std::size_t(window) - n) * 0.5 * range / double(n - 1);
	}
	const double h1 = 0.001 * h;
	const double h9 = 0.999 * h;

	const std::size_t count = right - left + 1;
	std::vector<double> w(count, 0.0);
	bool use_rho = !robustness.empty();
	for (int attempt = 0; attempt < 2; ++attempt) {
		double total = 0.0;
		for (std::size_t j = 0; j < count; ++j) {
			const double r = std::abs(x[left + j] - xs);
			double wj = 0.0;
			if (r <= h9) {
				if (r <= h1) {
					wj = 1.0;
				} else {
					const double u = r / h;
					const double t = 1.0 - u * u * u;
					wj = t * t * t;
				}
				if (use_rho) {
					wj *= robustness[left + j];
				}
			}
			w[j] = wj;
			total += wj;
		}
		if (total > 0.0) {
			for (auto& wj : w) {
				wj /= total;
			}
			break;
		}
		if (!use_rho) {
			// All window points at zero tricube weight cannot happen (the
			// nearest point always gets weight 1), so total 0 means the
			// robustness weights vanished here; refit without them.
			throw std::logic_error("loess: zero total weight without robustness weights");
		}
		use_rho = false;
	}

	if (degree == 1) {
		double a = 0.0;
		for (std::size_t j = 0; j < count; ++j) {
			a += w[j] * x[left + j];
		}
		double c = 0.0;
		for (std::size_t j = 0; j < count; ++j) {
			const double d = x[left + j] - a;
			c += w[j] * d * d;
		}
		if (std::sqrt(c) > 0.001 * range) {
			const double b = (xs - a) / c;
			for (std::size_t j = 0; j < count; ++j) {
				w[j] *= 1.0 + b * (x[left + j] - a);
			}
		}
		// else: local x spread is degenerate; keep the weighted mean.
	}

	double fitted = 0.0;
	for (std::size_t j = 0; j < count; ++j) {
		fitted += w[j] * y[left + j];
	}
	return fitted;
}

} // namespace detail

/// Locally weighted regression evaluated at one arbitrary position.
inline double loess_at(std::span<const double> x, std::span<const double> y, int window, int degree, double xs,
					   std::span<const double> robustness = {}) {
	detail::check_loess_args(x, y, window, degree, robustness);
	const auto [left, right] = detail::nearest_window(x, window, xs);
	return detail::fit_at(x, y, window, degree, robustness, xs, left, right);
}

/// Locally weighted regression evaluated at every data position: for each
/// point, fit a degree-0 or degree-1 weighted least-squares polynomial over
/// its `window` nearest neighbors with tricube distance weights (multiplied
/// by `robustness` weights when given) and evaluate it there.
inline std::vector<double> loess(std::span<const double> x, std::span<const double> y, int window, int degree,
								 std::span<const double> robustness = {}) {
	detail::check_loess_args(x, y, window, degree, robustness);
	std::vector<double> fitted(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		const auto [left, right] = detail::nearest_window(x, window, x[i]);
		fitted[i] = detail::fit_at(x, y, window, degree, robustness, x[i], left, right);
	}
	return fitted;
}

} // namespace ondat::decomp
