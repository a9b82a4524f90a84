#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ondat/rng.hpp"
#include "ondat/series.hpp"

namespace ondat::eval {

/// Settings for the bundled synthetic benchmark corpus: additive linear
/// trend + sinusoidal seasonality + AR(1) noise, heterogeneous per series.
struct SyntheticSpec {
	std::size_t n_series = 50;
	std::size_t length = 120;
	int period = 12;
	int horizon = 18;
	int input_size = 24;
	double level_min = 60.0, level_max = 140.0;
	double slope_min = -0.2, slope_max = 0.4;
	double amplitude_min = 8.0, amplitude_max = 30.0;
	double noise_sd_min = 2.0, noise_sd_max = 6.0;
	double ar_coefficient = 0.7;
};

/// Deterministic synthetic corpus for benchmarks and stress tests.
inline core::Corpus make_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
	rng::Stream stream(seed);
	core::Corpus corpus;
	corpus.horizon = spec.horizon;
	corpus.input_size = spec.input_size;
	corpus.series.reserve(spec.n_series);

	std::size_t width = 1;
	for (std::size_t n = spec.n_series; n >= 10; n /= 10) {
		++width;
	}
	for (std::size_t i = 0; i < spec.n_series; ++i) {
		const double level = stream.next_uniform(spec.level_min, spec.level_max);
		const double slope = stream.next_uniform(spec.slope_min, spec.slope_max);
		const double amplitude = stream.next_uniform(spec.amplitude_min, spec.amplitude_max);
		const double noise_sd = stream.next_uniform(spec.noise_sd_min, spec.noise_sd_max);
		const double phase = stream.next_uniform(0.0, double(spec.period));

		core::Series s;
		std::string number = std::to_string(i + 1);
		number.insert(0, width - number.size(), '0');
		s.id = "S" + number;
		s.period = spec.period;
		s.values.reserve(spec.length);
		double noise = 0.0;
		for (int burn = 0; burn < 20; ++burn) {
			noise = spec.ar_coefficient * noise + noise_sd * stream.next_gaussian();
		}
		for (std::size_t t = 0; t < spec.length; ++t) {
			noise = spec.ar_coefficient * noise + noise_sd * stream.next_gaussian();
			const double seasonal =
				amplitude * std::sin(2.0 * std::numbers::pi * (double(t) + phase) / double(spec.period));
			s.values.push_back(level + slope * double(t) + seasonal + noise);
		}
		corpus.series.push_back(std::move(s));
	}
	corpus.validate();
	return corpus;
}

} // namespace ondat::eval
