#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ondat/augment.hpp"
#include "ondat/bootstrap.hpp"
#include "ondat/log.hpp"
#include "ondat/rng.hpp"
#include "ondat/synthetic.hpp"

namespace {

using namespace ondat;

std::vector<double> random_values(std::size_t n, rng::Stream& stream, double lo = -5.0, double hi = 5.0) {
	std::vector<double> v(n);
	for (auto& value : v) {
		value = stream.next_uniform(lo, hi);
	}
	return v;
}

/// True iff `segment` appears as a contiguous run somewhere in `source`.
bool is_contiguous_block(std::span<const double> segment, std::span<const double> source) {
	if (segment.size() > source.size()) {
		return false;
	}
	for (std::size_t s = 0; s + segment.size() <= source.size(); ++s) {
		bool match = true;
		for (std::size_t j = 0; j < segment.size(); ++j) {
			if (source[s + j] != segment[j]) {
				match = false;
				break;
			}
		}
		if (match) {
			return true;
		}
	}
	return false;
}

/// A series whose log decomposes with (numerically) zero remainder: constant
/// trend plus an exactly m-periodic pattern. Periodic subseries smoothing
/// reproduces the pattern and the low-pass of a periodic signal is constant,
/// so the decomposition's remainder collapses to rounding noise.
core::Series zero_remainder_series(std::string id, int m, std::size_t n, rng::Stream& stream) {
	const double level = stream.next_uniform(1.0, 5.0);
	std::vector<double> pattern(static_cast<std::size_t>(m));
	for (auto& p : pattern) {
		p = stream.next_uniform(-1.0, 1.0);
	}
	core::Series series{std::move(id), m, std::vector<double>(n)};
	for (std::size_t i = 0; i < n; ++i) {
		series.values[i] = std::exp(level + pattern[i % std::size_t(m)]);
	}
	return series;
}

} // namespace

TEST_CASE("mbb resampling draws ceil(t/l) blocks and truncates to t") {
	rng::Stream stream(1);
	for (const std::size_t t : {std::size_t(20), std::size_t(23), std::size_t(24)}) {
		const auto remainder = random_values(t, stream);
		const auto out = augment::mbb_resample(remainder, 12, stream);
		REQUIRE(out.size() == t);
		// every aligned full block of the output is a contiguous input run
		const std::size_t l = 12;
		for (std::size_t start = 0; start + l <= out.size(); start += l) {
			REQUIRE(is_contiguous_block(std::span(out).subspan(start, l), remainder));
		}
		// the trailing partial block is the prefix of some contiguous run
		const std::size_t tail = out.size() % l;
		if (tail > 0) {
			REQUIRE(is_contiguous_block(std::span(out).last(tail), remainder));
		}
	}
}

TEST_CASE("mbb rejects degenerate block sizes; fixed bootstrap samples values") {
	rng::Stream stream(2);
	const auto remainder = random_values(30, stream);
	REQUIRE_THROWS_AS(augment::mbb_resample(remainder, 1, stream), std::invalid_argument);
	REQUIRE_THROWS_AS(augment::mbb_resample(remainder, 31, stream), std::invalid_argument);

	const auto fixed = augment::fixed_bootstrap_resample(remainder, stream);
	REQUIRE(fixed.size() == remainder.size());
	const std::set<double> pool(remainder.begin(), remainder.end());
	for (const double v : fixed) {
		REQUIRE(pool.count(v) == 1);
	}
}

TEST_CASE("bootstrap draws are deterministic per stream seed") {
	const auto remainder = [] {
		rng::Stream s(3);
		return random_values(40, s);
	}();
	rng::Stream a(7);
	rng::Stream b(7);
	rng::Stream c(8);
	REQUIRE(augment::mbb_resample(remainder, 5, a) == augment::mbb_resample(remainder, 5, b));
	REQUIRE(augment::mbb_resample(remainder, 5, a) != augment::mbb_resample(remainder, 5, c));
}

TEST_CASE("synthesize leaves zero-remainder series unchanged for both methods") {
	rng::Stream make(31);
	for (const auto method : {augment::Method::mbb, augment::Method::fixed_bootstrap}) {
		for (std::size_t si = 0; si < 10; ++si) {
			const int m = si % 2 == 0 ? 12 : 4;
			const std::size_t n = 3 * std::size_t(m) + std::size_t(make.next_below(60));
			const auto series = zero_remainder_series("z" + std::to_string(si), m, n, make);
			rng::Stream stream(100 + si);
			augment::AugmenterConfig config;
			config.method = method;
			config.stream = &stream;
			const auto syn = augment::synthesize(series, config);
			REQUIRE(syn.values.size() == series.values.size());
			double worst = 0.0;
			for (std::size_t i = 0; i < series.length(); ++i) {
				worst = std::max(worst, std::abs(syn.values[i] - series.values[i]));
			}
			REQUIRE(worst <= 1e-6);
		}
	}
}

TEST_CASE("synthesize adds the reserved suffix and draws reproducibly") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 5);
	const auto& series = corpus.series[0];
	augment::AugmenterConfig config;

	rng::Stream a(11);
	config.stream = &a;
	const auto syn1 = augment::synthesize(series, config);
	rng::Stream b(11);
	config.stream = &b;
	const auto syn2 = augment::synthesize(series, config);
	rng::Stream c(12);
	config.stream = &c;
	const auto syn3 = augment::synthesize(series, config);

	REQUIRE(syn1.id == series.id + "#syn");
	REQUIRE(syn1.period == series.period);
	REQUIRE(syn1.values == syn2.values);
	REQUIRE(syn1.values != syn3.values);
	REQUIRE(syn1.values != series.values); // a real resample changes something
	REQUIRE_THROWS_AS(augment::synthesize(series, augment::AugmenterConfig{}), std::invalid_argument);
}

TEST_CASE("identity method copies values exactly") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 6);
	rng::Stream stream(4);
	augment::AugmenterConfig config;
	config.method = augment::Method::identity;
	config.stream = &stream;
	const auto syn = augment::synthesize(corpus.series[0], config);
	REQUIRE(syn.values == corpus.series[0].values);
	REQUIRE(syn.id == corpus.series[0].id + "#syn");
}

TEST_CASE("synthesize degrades to an identity copy when decomposition is impossible") {
	core::Series tiny{"tiny", 12, std::vector<double>(20, 3.0)}; // 20 < 3*12
	rng::Stream stream(9);
	augment::AugmenterConfig config;
	config.stream = &stream;

	std::vector<std::string> warnings;
	log::set_warning_handler([&](const std::string& msg) { warnings.push_back(msg); });
	const auto syn = augment::synthesize(tiny, config);
	log::set_warning_handler(nullptr);

	REQUIRE(syn.values == tiny.values);
	REQUIRE(syn.id == "tiny#syn");
	REQUIRE(warnings.size() == 1);
	REQUIRE(warnings[0].find("identity fallback") != std::string::npos);
	REQUIRE(warnings[0].find("tiny") != std::string::npos);
}

TEST_CASE("augment_batch keeps originals in order and appends one synthetic each") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 13);
	std::vector<core::Series> batch(corpus.series.begin(), corpus.series.begin() + 4);
	rng::Stream stream(21);
	augment::AugmenterConfig config;
	config.stream = &stream;

	const auto doubled = augment::augment_batch(batch, config);
	REQUIRE(doubled.size() == 8);
	for (std::size_t i = 0; i < 4; ++i) {
		REQUIRE(doubled[i].id == batch[i].id);
		REQUIRE(doubled[i].values == batch[i].values);
		REQUIRE(doubled[4 + i].id == batch[i].id + "#syn");
		REQUIRE(doubled[4 + i].values.size() == batch[i].values.size());
	}

	SECTION("successive calls draw different synthetics") {
		const auto again = augment::augment_batch(batch, config);
		REQUIRE(again[4].values != doubled[4].values);
	}
	SECTION("same stream state reproduces the draw") {
		rng::Stream replay(21);
		augment::AugmenterConfig rconfig = config;
		rconfig.stream = &replay;
		const auto redo = augment::augment_batch(batch, rconfig);
		for (std::size_t i = 0; i < doubled.size(); ++i) {
			REQUIRE(redo[i].values == doubled[i].values);
		}
	}
}

TEST_CASE("augment_corpus appends numbered synthetics and rejects reserved ids") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 14);
	core::Corpus small;
	small.horizon = corpus.horizon;
	small.input_size = corpus.input_size;
	small.series.assign(corpus.series.begin(), corpus.series.begin() + 3);

	rng::Stream stream(33);
	augment::AugmenterConfig config;
	config.stream = &stream;
	const auto out = augment::augment_corpus(small, config, 2);
	REQUIRE(out.series.size() == 9);
	REQUIRE(out.series[3].id == small.series[0].id + "#syn");
	REQUIRE(out.series[6].id == small.series[0].id + "#syn2");

	SECTION("reserved suffix in input is rejected") {
		core::Corpus bad = small;
		bad.series[1].id += "#syn";
		REQUIRE_THROWS_WITH(augment::augment_corpus(bad, config, 1),
							Catch::Matchers::ContainsSubstring("#syn"));
	}
	SECTION("duplicate ids are rejected") {
		core::Corpus bad = small;
		bad.series[1].id = bad.series[0].id;
		REQUIRE_THROWS_WITH(augment::augment_corpus(bad, config, 1),
							Catch::Matchers::ContainsSubstring("duplicate"));
	}
}

TEST_CASE("decomposition cache returns identical components and changes nothing") {
	const auto corpus = eval::make_synthetic_corpus(eval::SyntheticSpec{}, 15);
	const auto& series = corpus.series[0];
	const auto params = decomp::StlParams::defaults(series.period);

	augment::DecompCache cache;
	const auto& first = cache.get_or_compute(series, params);
	const auto& second = cache.get_or_compute(series, params);
	REQUIRE(&first == &second);
	REQUIRE(cache.size() == 1);

	const auto direct = decomp::decompose_series(series, params);
	REQUIRE(first.trend == direct.trend);
	REQUIRE(first.seasonal == direct.seasonal);
	REQUIRE(first.remainder == direct.remainder);

	// synthesis with and without the cache is bitwise identical
	rng::Stream a(77);
	augment::AugmenterConfig with_cache;
	with_cache.stream = &a;
	with_cache.cache = &cache;
	const auto syn_cached = augment::synthesize(series, with_cache);

	rng::Stream b(77);
	augment::AugmenterConfig no_cache;
	no_cache.stream = &b;
	const auto syn_direct = augment::synthesize(series, no_cache);
	REQUIRE(syn_cached.values == syn_direct.values);

	// a view of the same id with a different length occupies its own slot
	const auto view = series.view(0, series.length() - corpus.horizon);
	cache.get_or_compute(view, params);
	REQUIRE(cache.size() == 2);
}

TEST_CASE("method names parse and print consistently") {
	REQUIRE(augment::parse_method("mbb") == augment::Method::mbb);
	REQUIRE(augment::parse_method("fixed") == augment::Method::fixed_bootstrap);
	REQUIRE(augment::parse_method("identity") == augment::Method::identity);
	REQUIRE(augment::method_name(augment::Method::fixed_bootstrap) == "fixed");
	REQUIRE_THROWS_WITH(augment::parse_method("bogus"), Catch::Matchers::ContainsSubstring("bogus"));
}
