#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ondat/bootstrap.hpp"
#include "ondat/log.hpp"
#include "ondat/rng.hpp"
#include "ondat/series.hpp"
#include "ondat/stl.hpp"

namespace ondat::augment {

enum class Method {
	mbb,
	fixed_bootstrap,
	identity,
};

inline Method parse_method(std::string_view name) {
	if (name == "mbb") {
		return Method::mbb;
	}
	if (name == "fixed") {
		return Method::fixed_bootstrap;
	}
	if (name == "identity") {
		return Method::identity;
	}
	throw std::invalid_argument("unknown augmentation method '" + std::string(name) + "' (expected mbb, fixed or identity)");
}

inline std::string_view method_name(Method m) {
	switch (m) {
	case Method::mbb:
		return "mbb";
	case Method::fixed_bootstrap:
		return "fixed";
	case Method::identity:
		return "identity";
	}
	throw std::logic_error("method_name: bad enum value");
}

/// Optional memo for per-series decompositions. Trend and seasonal are
/// deterministic per (id, length), so only the remainder resample needs to be
/// redrawn each call; one cache instance must not be shared across corpora
/// that reuse ids with different values.
class DecompCache {
public:
	const decomp::Decomposition& get_or_compute(const core::Series& series, const decomp::StlParams& params) {
		const std::string key = series.id + '\x1f' + std::to_string(series.length());
		{
			std::lock_guard lock(mutex_);
			auto it = map_.find(key);
			if (it != map_.end()) {
				return it->second;
			}
		}
		decomp::Decomposition d = decomp::decompose_series(series, params);
		std::lock_guard lock(mutex_);
		return map_.try_emplace(key, std::move(d)).first->second;
	}

	std::size_t size() const {
		std::lock_guard lock(mutex_);
		return map_.size();
	}

private:
	mutable std::mutex mutex_;
	std::unordered_map<std::string, decomp::Decomposition> map_;
};

/// Settings for synthetic-series generation.
struct AugmenterConfig {
	Method method = Method::mbb;
	int block_size = 0;							   // 0 = use the series period
	std::optional<decomp::StlParams> stl_params{}; // nullopt = defaults for the period
	rng::Stream* stream = nullptr;				   // non-owning; required by the drawing entry points
	DecompCache* cache = nullptr;				   // non-owning; nullptr = recompute per call
};

constexpr std::string_view kSyntheticSuffix = "#syn";

namespace detail {

/// Decompose, resample the remainder, recombine and undo the log. Any
/// decomposition or resampling failure degrades to an identity copy with a
/// warning so a training run never aborts mid-stream.
inline core::Series synthesize_with(const core::Series& series, const AugmenterConfig& config, rng::Stream& stream) {
	core::Series out = series;
	out.id += kSyntheticSuffix;
	if (config.method == Method::identity) {
		return out;
	}
	try {
		const decomp::StlParams params =
			config.stl_params ? *config.stl_params : decomp::StlParams::defaults(series.period);
		decomp::Decomposition local;
		const decomp::Decomposition& d = config.cache ? config.cache->get_or_compute(series, params)
													  : (local = decomp::decompose_series(series, params), local);
		const int l = config.block_size > 0 ? config.block_size : series.period;
		std::vector<double> resampled = config.method == Method::mbb ? mbb_resample(d.remainder, l, stream)
																	 : fixed_bootstrap_resample(d.remainder, stream);
		for (std::size_t i = 0; i < resampled.size(); ++i) {
			resampled[i] += d.trend[i] + d.seasonal[i];
		}
		out.values = decomp::inverse_log(resampled, d.log_offset, series.id);
	} catch (const std::exception& e) {
		log::warn("synthesize: identity fallback for '" + series.id + "': " + e.what());
		out.values = series.values;
	}
	return out;
}

} // namespace detail

/// Generate one bootstrapped version of a series, drawing from config.stream.
inline core::Series synthesize(const core::Series& series, const AugmenterConfig& config) {
	if (config.stream == nullptr) {
		throw std::invalid_argument("synthesize: config.stream is required");
	}
	return detail::synthesize_with(series, config, *config.stream);
}

/// Double a batch: the originals in order, then one synthetic per original in
/// the same order. Draws one ticket from the shared stream per call and gives
/// every series its own sub-stream derived from (ticket, position), so output
/// is independent of evaluation order yet differs between successive calls.
inline std::vector<core::Series> augment_batch(std::span<const core::Series> batch, const AugmenterConfig& config) {
	if (batch.empty()) {
		throw std::invalid_argument("augment_batch: empty batch");
	}
	if (config.stream == nullptr) {
		throw std::invalid_argument("augment_batch: config.stream is required");
	}
	const std::uint64_t ticket = config.stream->next_u64();
	std::vector<core::Series> out;
	out.reserve(2 * batch.size());
	out.insert(out.end(), batch.begin(), batch.end());
	for (std::size_t i = 0; i < batch.size(); ++i) {
		rng::Stream child(rng::mix(ticket, i));
		out.push_back(detail::synthesize_with(batch[i], config, child));
	}
	return out;
}

/// Corpus-level augmentation: originals plus `multiplicity` synthetics per
/// series, suffixed #syn, #syn2, ... Refuses inputs whose ids already use the
/// reserved suffix so synthetic provenance stays unambiguous.
inline core::Corpus augment_corpus(const core::Corpus& corpus, const AugmenterConfig& config, int multiplicity) {
	if (multiplicity < 1) {
		throw std::invalid_argument("augment_corpus: multiplicity must be >= 1");
	}
	if (config.stream == nullptr) {
		throw std::invalid_argument("augment_corpus: config.stream is required");
	}
	std::unordered_set<std::string_view> seen;
	for (const auto& s : corpus.series) {
		if (s.id.find(kSyntheticSuffix) != std::string::npos) {
			throw std::runtime_error("augment_corpus: input id '" + s.id + "' uses the reserved suffix '" +
									 std::string(kSyntheticSuffix) + "'");
		}
		if (!seen.insert(s.id).second) {
			throw std::runtime_error("augment_corpus: duplicate input id '" + s.id + "'");
		}
	}
	core::Corpus out = corpus;
	for (int round = 1; round <= multiplicity; ++round) {
		const std::vector<core::Series> doubled = augment_batch(corpus.series, config);
		for (std::size_t i = corpus.series.size(); i < doubled.size(); ++i) {
			core::Series syn = doubled[i];
			if (round > 1) {
				syn.id += std::to_string(round);
			}
			out.series.push_back(std::move(syn));
		}
	}
	return out;
}

} // namespace ondat::augment
