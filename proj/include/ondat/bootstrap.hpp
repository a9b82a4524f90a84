#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ondat/rng.hpp"

namespace ondat::augment {

/// Moving-blocks bootstrap: draw ceil(t/l) of the t-l+1 overlapping
/// length-l blocks uniformly with replacement, concatenate, truncate to t.
inline std::vector<double> mbb_resample(std::span<const double> remainder, int block_size, rng::Stream& stream) {
	const std::size_t t = remainder.size();
	if (block_size < 2) {
		throw std::invalid_argument("mbb_resample: block size must be >= 2");
	}
	const std::size_t l = std::size_t(block_size);
	if (t < l) {
		throw std::invalid_argument("mbb_resample: series length " + std::to_string(t) + " below block size " +
									std::to_string(l) + "; use the identity fallback");
	}
	const std::size_t n_blocks = t - l + 1;
	const std::size_t n_draws = (t + l - 1) / l;
	std::vector<double> out;
	out.reserve(n_draws * l);
	for (std::size_t d = 0; d < n_draws; ++d) {
		const std::size_t b = std::size_t(stream.next_below(n_blocks));
		out.insert(out.end(), remainder.begin() + long(b), remainder.begin() + long(b + l));
	}
	out.resize(t);
	return out;
}

/// Order-free bootstrap: t i.i.d. uniform draws with replacement.
inline std::vector<double> fixed_bootstrap_resample(std::span<const double> remainder, rng::Stream& stream) {
	const std::size_t t = remainder.size();
	if (t == 0) {
		throw std::invalid_argument("fixed_bootstrap_resample: empty input");
	}
	std::vector<double> out;
	out.reserve(t);
	for (std::size_t i = 0; i < t; ++i) {
		out.push_back(remainder[std::size_t(stream.next_below(t))]);
	}
	return out;
}

} // namespace ondat::augment
