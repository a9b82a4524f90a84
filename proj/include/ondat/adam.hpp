#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ondat/nhits.hpp"

namespace ondat::model {

/// Adam accumulators plus the step-decay schedule inputs.
struct OptimizerState {
	std::size_t step = 0;
	double base_lr = 1e-3;
	int max_steps = 0; // decay reference M; <= 0 disables the schedule
	std::vector<double> m;
	std::vector<double> v;
};

/// Learning rate at 1-based update t: the base rate halved at each of the
/// distinct positive boundaries floor(M/4), floor(M/2) and floor(3M/4).
inline double scheduled_lr(double base_lr, std::size_t t, int max_steps) {
	if (max_steps <= 0) {
		return base_lr;
	}
	double lr = base_lr;
	std::size_t previous = 0;
	for (std::size_t quarter = 1; quarter <= 3; ++quarter) {
		const std::size_t boundary = std::size_t(max_steps) * quarter / 4;
		if (boundary > 0 && boundary != previous && t >= boundary) {
			lr *= 0.5;
		}
		previous = boundary;
	}
	return lr;
}

/// One Adam update (beta1 0.9, beta2 0.999, eps 1e-8) with bias correction
/// and the step-decay schedule above. Mutates model parameters in place.
inline void adam_step(ForecastModel& model, std::span<const double> gradients, OptimizerState& opt) {
	auto params = model.parameters();
	if (gradients.size() != params.size()) {
		throw std::invalid_argument("adam_step: gradient size does not match the model");
	}
	if (opt.m.empty()) {
		opt.m.assign(params.size(), 0.0);
		opt.v.assign(params.size(), 0.0);
	}
	if (opt.m.size() != params.size() || opt.v.size() != params.size()) {
		throw std::invalid_argument("adam_step: optimizer state does not match the model");
	}

	constexpr double beta1 = 0.9;
	constexpr double beta2 = 0.999;
	constexpr double eps = 1e-8;
	++opt.step;
	const double t = double(opt.step);
	const double lr = scheduled_lr(opt.base_lr, opt.step, opt.max_steps);
	const double bc1 = 1.0 - std::pow(beta1, t);
	const double bc2 = 1.0 - std::pow(beta2, t);
	for (std::size_t i = 0; i < params.size(); ++i) {
		const double g = gradients[i];
		opt.m[i] = beta1 * opt.m[i] + (1.0 - beta1) * g;
		opt.v[i] = beta2 * opt.v[i] + (1.0 - beta2) * g * g;
		const double m_hat = opt.m[i] / bc1;
		const double v_hat = opt.v[i] / bc2;
		params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
		if (!std::isfinite(params[i])) {
			throw std::runtime_error("adam_step: non-finite parameter " + std::to_string(i) + " at step " +
									 std::to_string(opt.step) + " (gradient " + std::to_string(g) + ")");
		}
	}
}

} // namespace ondat::model
