#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ondat/matrix.hpp"

namespace ondat::core {

/// One univariate time series: identifier, seasonal period, ordered values.
struct Series {
	std::string id;
	int period = 1; // observations per seasonal cycle (12 monthly, 4 quarterly)
	std::vector<double> values;

	std::size_t length() const {
		return values.size();
	}

	void validate() const {
		if (values.empty()) {
			throw std::invalid_argument("series '" + id + "': empty");
		}
		if (period < 1) {
			throw std::invalid_argument("series '" + id + "': period must be >= 1");
		}
		for (std::size_t i = 0; i < values.size(); ++i) {
			if (!std::isfinite(values[i])) {
				throw std::invalid_argument("series '" + id + "': non-finite value at index " + std::to_string(i));
			}
		}
	}

	/// Copy of the half-open value range [begin, end).
	Series view(std::size_t begin, std::size_t end) const {
		if (begin > end || end > values.size()) {
			throw std::out_of_range("series '" + id + "': bad view range");
		}
		return Series{id, period, std::vector<double>(values.begin() + long(begin), values.begin() + long(end))};
	}
};

/// A collection of series sharing period, horizon and input size.
struct Corpus {
	std::vector<Series> series;
	int horizon = 0;	// h, forecast steps
	int input_size = 0; // q, lags per window

	static std::size_t min_length(int input_size, int horizon) {
		return std::size_t(input_size) + 2 * std::size_t(horizon);
	}

	int period() const {
		return series.empty() ? 1 : series.front().period;
	}

	std::size_t total_observations() const {
		std::size_t n = 0;
		for (const auto& s : series) {
			n += s.length();
		}
		return n;
	}

	void validate() const {
		if (horizon < 1 || input_size < 1) {
			throw std::invalid_argument("corpus: horizon and input_size must be >= 1");
		}
		const int m = period();
		for (const auto& s : series) {
			s.validate();
			if (s.period != m) {
				throw std::invalid_argument("corpus: series '" + s.id + "' has period " + std::to_string(s.period) +
											", expected " + std::to_string(m));
			}
			if (s.length() < min_length(input_size, horizon)) {
				throw std::invalid_argument("corpus: series '" + s.id + "' shorter than q+2h");
			}
		}
	}
};

/// Half-open index ranges: [0, train_end) train, [train_end, val_end)
/// validation, [val_end, test_end) test.
struct SplitRange {
	std::size_t train_end = 0;
	std::size_t val_end = 0;
	std::size_t test_end = 0;
};

/// Per-series temporal split; ranges parallel to the parent corpus.
struct SplitCorpus {
	std::vector<SplitRange> ranges;
};

/// Last h observations are test, the h before them validation, the rest train.
inline SplitCorpus split(const Corpus& corpus) {
	corpus.validate();
	SplitCorpus out;
	out.ranges.reserve(corpus.series.size());
	const std::size_t h = std::size_t(corpus.horizon);
	for (const auto& s : corpus.series) {
		const std::size_t t = s.length();
		out.ranges.push_back(SplitRange{t - 2 * h, t - h, t});
	}
	return out;
}

/// Supervised windows: row j of inputs holds q consecutive observations,
/// row j of targets the h that follow them.
struct WindowSet {
	Matrix inputs;	// (N, q)
	Matrix targets; // (N, h)
	std::vector<std::string> series_ids;

	std::size_t size() const {
		return series_ids.size();
	}
};

/// Sliding-window time-delay embedding over one contiguous series view.
/// Returns an empty WindowSet when the view is shorter than q + h.
inline WindowSet embed(const Series& view, int q, int h) {
	if (q < 1 || h < 1) {
		throw std::invalid_argument("embed: q and h must be >= 1");
	}
	WindowSet out;
	const std::size_t t = view.length();
	const std::size_t need = std::size_t(q) + std::size_t(h);
	if (t < need) {
		return out;
	}
	const std::size_t n = t - need + 1;
	out.inputs = Matrix(n, std::size_t(q));
	out.targets = Matrix(n, std::size_t(h));
	out.series_ids.assign(n, view.id);
	for (std::size_t j = 0; j < n; ++j) {
		for (int k = 0; k < q; ++k) {
			out.inputs(j, std::size_t(k)) = view.values[j + std::size_t(k)];
		}
		for (int k = 0; k < h; ++k) {
			out.targets(j, std::size_t(k)) = view.values[j + std::size_t(q) + std::size_t(k)];
		}
	}
	return out;
}

/// Stack the windows of many series views into one WindowSet.
inline WindowSet embed_all(std::span<const Series> views, int q, int h) {
	std::size_t total = 0;
	std::vector<WindowSet> parts;
	parts.reserve(views.size());
	for (const auto& v : views) {
		parts.push_back(embed(v, q, h));
		total += parts.back().size();
	}
	WindowSet out;
	out.inputs = Matrix(total, std::size_t(q));
	out.targets = Matrix(total, std::size_t(h));
	out.series_ids.reserve(total);
	std::size_t row = 0;
	for (const auto& p : parts) {
		for (std::size_t j = 0; j < p.size(); ++j, ++row) {
			for (std::size_t k = 0; k < std::size_t(q); ++k) {
				out.inputs(row, k) = p.inputs(j, k);
			}
			for (std::size_t k = 0; k < std::size_t(h); ++k) {
				out.targets(row, k) = p.targets(j, k);
			}
			out.series_ids.push_back(p.series_ids[j]);
		}
	}
	return out;
}

} // namespace ondat::core
