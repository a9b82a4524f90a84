#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ondat/loess.hpp"
#include "ondat/series.hpp"

namespace ondat::decomp {

/// Additive decomposition of a log-scale series.
struct Decomposition {
	std::vector<double> trend;
	std::vector<double> seasonal;
	std::vector<double> remainder;
	double log_offset = 0.0; // c added to the raw values before the logarithm
};

/// Thrown when a series does not satisfy the decomposition preconditions;
/// callers treat it as "pass the series through unchanged".
struct DecompositionSkipped : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct LogTransform {
	std::vector<double> values;
	double offset = 0.0;
};

/// Natural log with an automatic shift: offset 0 when all values are
/// positive, otherwise 1 - min so the smallest shifted value is 1.
inline LogTransform log_transform(std::span<const double> values) {
	if (values.empty()) {
		throw std::invalid_argument("log_transform: empty input");
	}
	const double lo = *std::min_element(values.begin(), values.end());
	LogTransform out;
	out.offset = lo > 0.0 ? 0.0 : 1.0 - lo;
	out.values.reserve(values.size());
	for (const double v : values) {
		out.values.push_back(std::log(v + out.offset));
	}
	return out;
}

/// Inverse of log_transform: exp(values) - offset.
inline std::vector<double> inverse_log(std::span<const double> values, double offset, std::string_view id = {}) {
	std::vector<double> out;
	out.reserve(values.size());
	for (std::size_t i = 0; i < values.size(); ++i) {
		const double v = std::exp(values[i]);
		if (!std::isfinite(v)) {
			std::string where = id.empty() ? std::string("inverse_log") : "inverse_log: series '" + std::string(id) + "'";
			throw std::runtime_error(where + ": exp overflow at index " + std::to_string(i));
		}
		out.push_back(v - offset);
	}
	return out;
}

/// STL smoothing parameters. seasonal_window == kPeriodic replaces
/// cycle-subseries loess with the per-subseries mean.
struct StlParams {
	static constexpr int kPeriodic = 0;

	int seasonal_window = kPeriodic;
	int trend_window = 0;
	int lowpass_window = 0;
	int inner_iterations = 2;
	int outer_iterations = 0;

	/// Standard defaults for seasonal period m: periodic seasonal smoothing,
	/// trend window = next odd >= ceil(1.5m / (1 - 1.5/s)) with s taken as 7,
	/// low-pass window = next odd >= m.
	static StlParams defaults(int period) {
		if (period < 2) {
			throw std::invalid_argument("StlParams::defaults: period must be >= 2");
		}
		auto next_odd = [](double v) {
			int k = int(std::ceil(v));
			return k % 2 == 0 ? k + 1 : k;
		};
		StlParams p;
		p.trend_window = std::max(3, next_odd(1.5 * period / (1.0 - 1.5 / 7.0)));
		p.lowpass_window = std::max(3, next_odd(double(period)));
		return p;
	}

	void validate() const {
		auto check_window = [](int w, const char* name) {
			if (w < 3 || w % 2 == 0) {
				throw std::invalid_argument(std::string("StlParams: ") + name + " must be odd and >= 3");
			}
		};
		if (seasonal_window != kPeriodic) {
			check_window(seasonal_window, "seasonal_window");
		}
		check_window(trend_window, "trend_window");
		check_window(lowpass_window, "lowpass_window");
		if (inner_iterations < 1) {
			throw std::invalid_argument("StlParams: inner_iterations must be >= 1");
		}
		if (outer_iterations < 0) {
			throw std::invalid_argument("StlParams: outer_iterations must be >= 0");
		}
	}
};

namespace detail {

/// Centered-sum moving average of length k: out[i] = mean(v[i..i+k-1]).
inline std::vector<double> moving_average(std::span<const double> v, std::size_t k) {
	std::vector<double> out(v.size() - k + 1);
	double sum = 0.0;
	for (std::size_t i = 0; i < k; ++i) {
		sum += v[i];
	}
	out[0] = sum / double(k);
	for (std::size_t i = 1; i < out.size(); ++i) {
		sum += v[i + k - 1] - v[i - 1];
		out[i] = sum / double(k);
	}
	return out;
}

/// Smooth every cycle subseries of the detrended values and lay the results
/// out over an extended axis of length n + 2m (one extra cycle each side).
inline std::vector<double> seasonal_subseries(std::span<const double> detrended, int m, int seasonal_window,
											  std::span<const double> rho) {
	const std::size_t n = detrended.size();
	const std::size_t mm = std::size_t(m);
	std::vector<double> extended(n + 2 * mm);
	std::vector<double> sub_x, sub_y, sub_rho;
	for (std::size_t p = 0; p < mm; ++p) {
		const std::size_t count = (n - 1 - p) / mm + 1;
		sub_x.clear();
		sub_y.clear();
		sub_rho.clear();
		for (std::size_t j = 0; j < count; ++j) {
			sub_x.push_back(double(j));
			sub_y.push_back(detrended[p + j * mm]);
			if (!rho.empty()) {
				sub_rho.push_back(rho[p + j * mm]);
			}
		}
		if (seasonal_window == StlParams::kPeriodic || count < 2) {
			double wsum = 0.0;
			double vsum = 0.0;
			for (std::size_t j = 0; j < count; ++j) {
				const double w = rho.empty() ? 1.0 : sub_rho[j];
				wsum += w;
				vsum += w * sub_y[j];
			}
			if (wsum <= 0.0) {
				wsum = double(count);
				vsum = 0.0;
				for (const double v : sub_y) {
					vsum += v;
				}
			}
			const double mean = vsum / wsum;
			for (std::size_t j = 0; j < count + 2; ++j) {
				extended[j * mm + p] = mean;
			}
		} else {
			// Evaluate at subseries cycles -1 .. count to cover the extension.
			for (std::size_t j = 0; j < count + 2; ++j) {
				const double xs = double(j) - 1.0;
				extended[j * mm + p] = loess_at(sub_x, sub_y, seasonal_window, 0, xs, sub_rho);
			}
		}
	}
	return extended;
}

/// Low-pass filter of the extended seasonal: moving averages of length m, m
/// and 3 (bringing length n+2m back to n), then a degree-1 loess.
inline std::vector<double> low_pass(std::span<const double> extended, int m, int lowpass_window) {
	auto a = moving_average(extended, std::size_t(m));
	auto b = moving_average(a, std::size_t(m));
	auto c = moving_average(b, 3);
	std::vector<double> x(c.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		x[i] = double(i);
	}
	return loess(x, c, lowpass_window, 1);
}

/// Bisquare robustness weights from the remainder, with Cleveland's 0.1% /
/// 99.9% clipping of the 6-median-absolute-residual scale.
inline std::vector<double> bisquare_weights(std::span<const double> remainder) {
	std::vector<double> absr(remainder.size());
	for (std::size_t i = 0; i < remainder.size(); ++i) {
		absr[i] = std::abs(remainder[i]);
	}
	std::vector<double> sorted = absr;
	std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
	double median = sorted[sorted.size() / 2];
	if (sorted.size() % 2 == 0) {
		std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2 - 1), sorted.end());
		median = 0.5 * (median + sorted[sorted.size() / 2 - 1]);
	}
	const double h = 6.0 * median;
	const double c1 = 0.001 * h;
	const double c9 = 0.999 * h;
	std::vector<double> rho(remainder.size());
	for (std::size_t i = 0; i < remainder.size(); ++i) {
		const double r = absr[i];
		if (r <= c1) {
			rho[i] = 1.0;
		} else if (r <= c9) {
			const double u = r / h;
			const double t = 1.0 - u * u;
			rho[i] = t * t;
		} else {
			rho[i] = 0.0;
		}
	}
	return rho;
}

} // namespace detail

/// Seasonal-trend decomposition by loess of a log-scale sequence. The inner
/// loop detrends, smooths each cycle subseries over an extended axis, removes
/// the low-pass component of that smoothing, deseasonalizes and re-estimates
/// the trend; outer iterations recompute bisquare robustness weights from the
/// remainder. The remainder is defined as input - trend - seasonal, so the
/// reconstruction identity holds by construction.
inline Decomposition stl(std::span<const double> values, int period, const StlParams& params,
						 std::string_view id = {}) {
	params.validate();
	const std::size_t n = values.size();
	auto skip = [&](const std::string& why) {
		std::string who = id.empty() ? std::string("stl") : "stl: series '" + std::string(id) + "'";
		return DecompositionSkipped(who + ": " + why);
	};
	if (period < 2) {
		throw skip("period must be >= 2");
	}
	if (n < 3 * std::size_t(period)) {
		throw skip("length " + std::to_string(n) + " below 3 seasonal cycles");
	}

	std::vector<double> positions(n);
	for (std::size_t i = 0; i < n; ++i) {
		positions[i] = double(i);
	}

	Decomposition d;
	d.trend.assign(n, 0.0);
	d.seasonal.assign(n, 0.0);
	std::vector<double> rho;
	std::vector<double> detrended(n);
	std::vector<double> deseason(n);
	for (int outer = 0; outer <= params.outer_iterations; ++outer) {
		for (int inner = 0; inner < params.inner_iterations; ++inner) {
			for (std::size_t i = 0; i < n; ++i) {
				detrended[i] = values[i] - d.trend[i];
			}
			const auto extended = detail::seasonal_subseries(detrended, period, params.seasonal_window, rho);
			const auto lp = detail::low_pass(extended, period, params.lowpass_window);
			for (std::size_t i = 0; i < n; ++i) {
				d.seasonal[i] = extended[i + std::size_t(period)] - lp[i];
				deseason[i] = values[i] - d.seasonal[i];
			}
			d.trend = loess(positions, deseason, params.trend_window, 1, rho);
		}
		if (outer < params.outer_iterations) {
			std::vector<double> remainder(n);
			for (std::size_t i = 0; i < n; ++i) {
				remainder[i] = values[i] - d.trend[i] - d.seasonal[i];
			}
			rho = detail::bisquare_weights(remainder);
		}
	}

	d.remainder.resize(n);
	for (std::size_t i = 0; i < n; ++i) {
		d.remainder[i] = values[i] - d.trend[i] - d.seasonal[i];
	}
	return d;
}

/// Log-transform a raw series and decompose it, recording the log offset.
inline Decomposition decompose_series(const core::Series& series, const StlParams& params) {
	const auto lt = log_transform(series.values);
	Decomposition d = stl(lt.values, series.period, params, series.id);
	d.log_offset = lt.offset;
	return d;
}

inline Decomposition decompose_series(const core::Series& series) {
	return decompose_series(series, StlParams::defaults(series.period));
}

} // namespace ondat::decomp
