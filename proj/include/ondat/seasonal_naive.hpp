#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ondat::model {

/// Repeat the last known observation of the same season: forecast step i
/// (0-based) copies history[t - m + (i mod m)]. Period 1 repeats the last
/// value.
inline std::vector<double> seasonal_naive(std::span<const double> history, int period, int horizon) {
	if (period < 1 || horizon < 1) {
		throw std::invalid_argument("seasonal_naive: period and horizon must be >= 1");
	}
	if (history.size() < std::size_t(period)) {
		throw std::invalid_argument("seasonal_naive: history shorter than one seasonal cycle");
	}
	const std::size_t t = history.size();
	const std::size_t m = std::size_t(period);
	std::vector<double> forecast(static_cast<std::size_t>(horizon));
	for (std::size_t i = 0; i < forecast.size(); ++i) {
		forecast[i] = history[t - m + (i % m)];
	}
	return forecast;
}

} // namespace ondat::model
