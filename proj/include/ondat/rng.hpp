#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ondat::rng {

// splitmix64 step; used for seed expansion and sub-stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
	std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
	std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
	return splitmix64(s);
}

inline std::uint64_t hash_label(std::string_view label) {
	// FNV-1a
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char c : label) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	return h;
}

/**
 * @brief Seeded random stream with deterministic sub-stream derivation.
 *
 * Wraps std::mt19937_64 (bit-exact across platforms). Bounded draws and
 * unit doubles are generated by hand instead of std::*_distribution, whose
 * algorithms are implementation-defined; this keeps runs reproducible for
 * a given seed everywhere.
 */
class Stream {
public:
	explicit Stream(std::uint64_t seed) : base_seed_(seed) {
		std::uint64_t s = seed;
		std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
		engine_.seed(seq);
	}

	// Independent child stream; does not consume state from this stream.
	Stream derive(std::string_view label) const {
		return Stream(mix(base_seed_, hash_label(label)));
	}
	Stream derive(std::uint64_t salt) const {
		return Stream(mix(base_seed_, salt));
	}

	std::uint64_t base_seed() const {
		return base_seed_;
	}

	std::uint64_t next_u64() {
		return engine_();
	}

	// Unbiased integer in [0, bound) via rejection sampling.
	std::uint64_t next_below(std::uint64_t bound) {
		if (bound <= 1) {
			return 0;
		}
		const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
		std::uint64_t x;
		do {
			x = engine_();
		} while (x >= limit);
		return x % bound;
	}

	// Uniform double in [0, 1), 53-bit resolution.
	double next_unit() {
		return double(engine_() >> 11) * 0x1.0p-53;
	}

	double next_uniform(double lo, double hi) {
		return lo + (hi - lo) * next_unit();
	}

	// Standard normal via Marsaglia's polar method with cached spare.
	double next_gaussian() {
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u, v, s;
		do {
			u = 2.0 * next_unit() - 1.0;
			v = 2.0 * next_unit() - 1.0;
			s = u * u + v * v;
		} while (s >= 1.0 || s == 0.0);
		const double k = std::sqrt(-2.0 * std::log(s) / s);
		spare_ = v * k;
		has_spare_ = true;
		return u * k;
	}

private:
	std::uint64_t base_seed_;
	std::mt19937_64 engine_;
	bool has_spare_ = false;
	double spare_ = 0.0;
};

} // namespace ondat::rng
