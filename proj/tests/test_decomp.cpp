#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ondat/loess.hpp"
#include "ondat/rng.hpp"
#include "ondat/stl.hpp"
#include "ondat/synthetic.hpp"

namespace {

using namespace ondat;

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
	REQUIRE(a.size() == b.size());
	double worst = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		worst = std::max(worst, std::abs(a[i] - b[i]));
	}
	return worst;
}

std::vector<double> positions(std::size_t n) {
	std::vector<double> x(n);
	std::iota(x.begin(), x.end(), 1.0);
	return x;
}

} // namespace

TEST_CASE("loess degree 1 reproduces affine sequences exactly") {
	rng::Stream stream(11);
	for (int trial = 0; trial < 100; ++trial) {
		const std::size_t n = 10 + std::size_t(stream.next_below(80));
		const double a = stream.next_uniform(-50.0, 50.0);
		const double b = stream.next_uniform(-3.0, 3.0);
		const auto x = positions(n);
		std::vector<double> y(n);
		for (std::size_t i = 0; i < n; ++i) {
			y[i] = a + b * x[i];
		}
		// windows both inside and beyond the data length
		const int window = 3 + 2 * int(stream.next_below(double(n))); // odd, may exceed n
		const auto fit = decomp::loess(x, y, window, 1);
		REQUIRE(max_abs_diff(fit, y) <= 1e-9);
	}
}

TEST_CASE("loess degree 0 reproduces constants for any window") {
	const auto x = positions(40);
	const std::vector<double> y(40, 3.25);
	for (const int window : {3, 7, 41, 999}) {
		const auto fit0 = decomp::loess(x, y, window, 0);
		const auto fit1 = decomp::loess(x, y, window, 1);
		REQUIRE(max_abs_diff(fit0, y) <= 1e-12);
		REQUIRE(max_abs_diff(fit1, y) <= 1e-12);
	}
}

TEST_CASE("loess nearest-window selection matches a brute-force nearest scan") {
	rng::Stream stream(5);
	for (int trial = 0; trial < 50; ++trial) {
		const std::size_t n = 5 + std::size_t(stream.next_below(40));
		std::vector<double> x(n);
		double acc = 0.0;
		for (auto& v : x) {
			acc += stream.next_uniform(0.1, 2.0);
			v = acc;
		}
		const int window = 3 + int(stream.next_below(double(n)));
		const double xs = stream.next_uniform(x.front() - 1.0, x.back() + 1.0);
		const auto [left, right] = decomp::detail::nearest_window(x, window, xs);

		// brute force: sort all points by distance, take the window closest
		std::vector<std::size_t> order(n);
		std::iota(order.begin(), order.end(), std::size_t{0});
		std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
			return std::abs(x[i] - xs) < std::abs(x[j] - xs);
		});
		const std::size_t len = std::min<std::size_t>(std::size_t(window), n);
		const double worst_selected = std::max(xs - x[left], x[right] - xs);
		double worst_brute = 0.0;
		for (std::size_t k = 0; k < len; ++k) {
			worst_brute = std::max(worst_brute, std::abs(x[order[k]] - xs));
		}
		REQUIRE(right - left + 1 == len);
		REQUIRE(worst_selected == Catch::Approx(worst_brute).margin(1e-12));
	}
}

TEST_CASE("loess validates its arguments") {
	const auto x = positions(10);
	const std::vector<double> y(10, 1.0);
	REQUIRE_THROWS_AS(decomp::loess(x, std::vector<double>(9, 1.0), 7, 1), std::invalid_argument);
	REQUIRE_THROWS_AS(decomp::loess(x, y, 2, 1), std::invalid_argument);
	REQUIRE_THROWS_AS(decomp::loess(x, y, 7, 2), std::invalid_argument);
	std::vector<double> unsorted = x;
	std::swap(unsorted[2], unsorted[3]);
	REQUIRE_THROWS_AS(decomp::loess(unsorted, y, 7, 1), std::invalid_argument);
}

TEST_CASE("moving average matches a direct windowed mean") {
	rng::Stream stream(17);
	std::vector<double> v(30);
	for (auto& value : v) {
		value = stream.next_uniform(-10.0, 10.0);
	}
	for (const std::size_t k : {std::size_t(1), std::size_t(3), std::size_t(7), std::size_t(12)}) {
		const auto ma = decomp::detail::moving_average(v, k);
		REQUIRE(ma.size() == v.size() - k + 1);
		for (std::size_t i = 0; i < ma.size(); ++i) {
			double mean = 0.0;
			for (std::size_t j = 0; j < k; ++j) {
				mean += v[i + j];
			}
			mean /= double(k);
			REQUIRE(ma[i] == Catch::Approx(mean).margin(1e-12));
		}
	}
}

TEST_CASE("bisquare weights are 1 at zero residual, 0 far out, and decreasing") {
	const std::vector<double> r{0.0, 1.0, -2.0, 3.0, -100.0};
	const auto w = decomp::detail::bisquare_weights(r);
	REQUIRE(w.size() == r.size());
	REQUIRE(w[0] == 1.0);		// |r| below 0.1% of the bandwidth
	REQUIRE(w[4] == 0.0);		// |r| beyond 99.9% of the bandwidth (h = 6*median = 12)
	REQUIRE(w[1] > w[2]);		// larger residual, smaller weight
	REQUIRE(w[2] > w[3]);
	for (const double value : w) {
		REQUIRE(value >= 0.0);
		REQUIRE(value <= 1.0);
	}
}

TEST_CASE("stl default windows follow the published formulas") {
	const auto p12 = decomp::StlParams::defaults(12);
	REQUIRE(p12.seasonal_window == decomp::StlParams::kPeriodic);
	REQUIRE(p12.trend_window == 23); // next odd >= 1.5*12 / (1 - 1.5/7) = 22.909
	REQUIRE(p12.lowpass_window == 13);
	REQUIRE(p12.inner_iterations == 2);
	REQUIRE(p12.outer_iterations == 0);

	const auto p4 = decomp::StlParams::defaults(4);
	REQUIRE(p4.trend_window == 9); // next odd >= 7.636
	REQUIRE(p4.lowpass_window == 5);
	REQUIRE_THROWS_AS(decomp::StlParams::defaults(1), std::invalid_argument);
}

TEST_CASE("stl reconstruction is exact on random seasonal series") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 3);
	for (const auto& series : corpus.series) {
		const auto d = decomp::stl(series.values, series.period, decomp::StlParams::defaults(series.period));
		double worst = 0.0;
		for (std::size_t i = 0; i < series.length(); ++i) {
			worst = std::max(worst, std::abs(d.trend[i] + d.seasonal[i] + d.remainder[i] - series.values[i]));
		}
		REQUIRE(worst <= 1e-9);
	}
}

TEST_CASE("periodic seasonal smoothing yields an exactly periodic component") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 9);
	for (std::size_t si = 0; si < 10; ++si) {
		const auto& series = corpus.series[si];
		const int m = series.period;
		const auto d = decomp::stl(series.values, m, decomp::StlParams::defaults(m));
		double worst = 0.0;
		for (std::size_t i = 0; i + std::size_t(m) < series.length(); ++i) {
			worst = std::max(worst, std::abs(d.seasonal[i + std::size_t(m)] - d.seasonal[i]));
		}
		REQUIRE(worst <= 1e-8);
	}
}

TEST_CASE("stl on a constant series finds constant trend and no seasonality") {
	const std::vector<double> values(60, 7.5);
	const auto d = decomp::stl(values, 12, decomp::StlParams::defaults(12));
	for (std::size_t i = 0; i < values.size(); ++i) {
		REQUIRE(d.trend[i] == Catch::Approx(7.5).margin(1e-9));
		REQUIRE(d.seasonal[i] == Catch::Approx(0.0).margin(1e-9));
		REQUIRE(d.remainder[i] == Catch::Approx(0.0).margin(1e-9));
	}
}

TEST_CASE("robustness iterations damp an outlier's pull on the trend") {
	const std::size_t n = 72;
	std::vector<double> values(n);
	for (std::size_t i = 0; i < n; ++i) {
		values[i] = 10.0 + 0.1 * double(i);
	}
	values[36] += 50.0; // single spike

	auto params = decomp::StlParams::defaults(12);
	const auto plain = decomp::stl(values, 12, params);
	params.outer_iterations = 5;
	const auto robust = decomp::stl(values, 12, params);

	auto trend_error = [&](const decomp::Decomposition& d) {
		double worst = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			if (i == 36) {
				continue; // judge the fit away from the spike itself
			}
			worst = std::max(worst, std::abs(d.trend[i] - (10.0 + 0.1 * double(i))));
		}
		return worst;
	};
	REQUIRE(trend_error(robust) < trend_error(plain));
}

TEST_CASE("stl rejects series it cannot decompose, naming the series") {
	const std::vector<double> values(20, 1.0);
	REQUIRE_THROWS_AS(decomp::stl(values, 1, decomp::StlParams::defaults(2), "tiny"),
					  decomp::DecompositionSkipped);
	REQUIRE_THROWS_WITH(decomp::stl(values, 12, decomp::StlParams::defaults(12), "tiny"),
						Catch::Matchers::ContainsSubstring("tiny")); // 20 < 3*12
}

TEST_CASE("log transform shifts only when needed and inverts cleanly") {
	SECTION("positive series keeps offset 0") {
		const std::vector<double> values{1.5, 2.0, 0.25};
		const auto lt = decomp::log_transform(values);
		REQUIRE(lt.offset == 0.0);
		REQUIRE(lt.values[0] == Catch::Approx(std::log(1.5)).margin(1e-15));
		const auto back = decomp::inverse_log(lt.values, lt.offset);
		REQUIRE(max_abs_diff(back, values) <= 1e-12);
	}
	SECTION("non-positive series shifts by 1 - min") {
		const std::vector<double> values{-3.0, 0.0, 5.0};
		const auto lt = decomp::log_transform(values);
		REQUIRE(lt.offset == 4.0); // 1 - (-3)
		REQUIRE(lt.values[0] == Catch::Approx(0.0).margin(1e-15)); // log(1)
		const auto back = decomp::inverse_log(lt.values, lt.offset);
		REQUIRE(max_abs_diff(back, values) <= 1e-12);
	}
	SECTION("exp overflow is an error naming the series") {
		const std::vector<double> values{1000.0};
		REQUIRE_THROWS_WITH(decomp::inverse_log(values, 0.0, "big"),
							Catch::Matchers::ContainsSubstring("big"));
	}
}

TEST_CASE("decompose_series reconstructs the log-transformed input") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 21);
	const auto& series = corpus.series[0];
	const auto d = decomp::decompose_series(series);
	const auto lt = decomp::log_transform(series.values);
	REQUIRE(d.log_offset == lt.offset);
	for (std::size_t i = 0; i < series.length(); ++i) {
		REQUIRE(d.trend[i] + d.seasonal[i] + d.remainder[i] == Catch::Approx(lt.values[i]).margin(1e-9));
	}
}
