#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ondat/matrix.hpp"
#include "ondat/metrics.hpp"
#include "ondat/rng.hpp"

namespace ondat::model {

enum class Activation { relu };
enum class Loss { mae, smape };
enum class WindowScaling { none, mean };

inline Loss parse_loss(std::string_view name) {
	if (name == "mae") {
		return Loss::mae;
	}
	if (name == "smape") {
		return Loss::smape;
	}
	throw std::invalid_argument("unknown loss '" + std::string(name) + "' (expected mae or smape)");
}

inline std::string_view loss_name(Loss loss) {
	return loss == Loss::mae ? "mae" : "smape";
}

inline WindowScaling parse_scaling(std::string_view name) {
	if (name == "none") {
		return WindowScaling::none;
	}
	if (name == "mean") {
		return WindowScaling::mean;
	}
	throw std::invalid_argument("unknown window scaling '" + std::string(name) + "' (expected none or mean)");
}

inline std::string_view scaling_name(WindowScaling s) {
	return s == WindowScaling::none ? "none" : "mean";
}

/// Rows whose mean falls at or below this use scale 1 under mean scaling.
constexpr double kScaleEpsilon = 1e-8;

/// Architecture and loss settings for the residual-stack forecaster.
struct ModelConfig {
	int n_stacks = 3;
	int blocks_per_stack = 1;
	int hidden_layers = 2;
	int hidden_units = 512;
	Activation activation = Activation::relu;
	int input_size = 0; // q
	int horizon = 0;	// h
	std::vector<int> pooling_kernels{1, 1, 1};
	Loss loss = Loss::mae;
	WindowScaling window_scaling = WindowScaling::mean;

	void validate() const {
		if (n_stacks < 1 || blocks_per_stack < 1 || hidden_layers < 1 || hidden_units < 1) {
			throw std::invalid_argument("ModelConfig: stack, block, layer and unit counts must be >= 1");
		}
		if (input_size < 1 || horizon < 1) {
			throw std::invalid_argument("ModelConfig: input_size and horizon must be >= 1");
		}
		if (pooling_kernels.size() != std::size_t(n_stacks)) {
			throw std::invalid_argument("ModelConfig: pooling_kernels must list one kernel per stack");
		}
		for (const int k : pooling_kernels) {
			if (k < 1) {
				throw std::invalid_argument("ModelConfig: pooling kernels must be >= 1");
			}
		}
	}
};

namespace detail {

/// One dense layer's slice of the flat parameter vector: weights are a
/// row-major (out, in) matrix at offset w, biases length out at offset b.
struct LayerSpec {
	std::size_t w = 0;
	std::size_t b = 0;
	std::size_t in = 0;
	std::size_t out = 0;
};

struct BlockSpec {
	int kernel = 1;
	std::size_t pooled_input = 0;	// ceil(q / kernel)
	std::size_t pooled_horizon = 0; // ceil(h / kernel)
	std::vector<LayerSpec> layers;	// hidden layers, then the theta layer
};

// Z (B,out) = X (B,in) * W^T + bias
inline void linear_forward(const Matrix& x, std::span<const double> w, std::span<const double> bias, Matrix& z) {
	const std::size_t in = x.cols();
	const std::size_t out = bias.size();
	for (std::size_t r = 0; r < x.rows(); ++r) {
		const double* xr = x.row(r);
		double* zr = z.row(r);
		for (std::size_t o = 0; o < out; ++o) {
			const double* wo = w.data() + o * in;
			double s = bias[o];
			for (std::size_t i = 0; i < in; ++i) {
				s += xr[i] * wo[i];
			}
			zr[o] = s;
		}
	}
}

// dX (B,in) = dZ (B,out) * W
inline Matrix linear_backward_input(const Matrix& dz, std::span<const double> w, std::size_t in) {
	Matrix dx(dz.rows(), in);
	for (std::size_t r = 0; r < dz.rows(); ++r) {
		const double* dzr = dz.row(r);
		double* dxr = dx.row(r);
		for (std::size_t o = 0; o < dz.cols(); ++o) {
			const double g = dzr[o];
			const double* wo = w.data() + o * in;
			for (std::size_t i = 0; i < in; ++i) {
				dxr[i] += g * wo[i];
			}
		}
	}
	return dx;
}

// dW += dZ^T X, db += column sums of dZ
inline void linear_backward_params(const Matrix& dz, const Matrix& x, std::span<double> dw, std::span<double> db) {
	const std::size_t in = x.cols();
	for (std::size_t r = 0; r < dz.rows(); ++r) {
		const double* dzr = dz.row(r);
		const double* xr = x.row(r);
		for (std::size_t o = 0; o < dz.cols(); ++o) {
			const double g = dzr[o];
			db[o] += g;
			double* dwo = dw.data() + o * in;
			for (std::size_t i = 0; i < in; ++i) {
				dwo[i] += g * xr[i];
			}
		}
	}
}

/// Linear interpolation of each row from `coarse` length nc to length nf,
/// mapping endpoints to endpoints; a single coarse value broadcasts.
inline Matrix interpolate_rows(const Matrix& coarse, std::size_t nf) {
	const std::size_t nc = coarse.cols();
	Matrix fine(coarse.rows(), nf);
	for (std::size_t r = 0; r < coarse.rows(); ++r) {
		const double* cr = coarse.row(r);
		double* fr = fine.row(r);
		for (std::size_t j = 0; j < nf; ++j) {
			if (nc == 1 || nf == 1) {
				fr[j] = cr[0];
				continue;
			}
			const double t = double(j) * double(nc - 1) / double(nf - 1);
			std::size_t i0 = std::size_t(t);
			if (i0 > nc - 2) {
				i0 = nc - 2;
			}
			const double frac = t - double(i0);
			fr[j] = cr[i0] * (1.0 - frac) + cr[i0 + 1] * frac;
		}
	}
	return fine;
}

/// Exact transpose of interpolate_rows: distributes each fine-position
/// gradient onto its two coarse sources with the same weights.
inline Matrix interpolate_rows_transpose(const Matrix& fine_grad, std::size_t nc) {
	const std::size_t nf = fine_grad.cols();
	Matrix coarse(fine_grad.rows(), nc);
	for (std::size_t r = 0; r < fine_grad.rows(); ++r) {
		const double* fr = fine_grad.row(r);
		double* cr = coarse.row(r);
		for (std::size_t j = 0; j < nf; ++j) {
			if (nc == 1 || nf == 1) {
				cr[0] += fr[j];
				continue;
			}
			const double t = double(j) * double(nc - 1) / double(nf - 1);
			std::size_t i0 = std::size_t(t);
			if (i0 > nc - 2) {
				i0 = nc - 2;
			}
			const double frac = t - double(i0);
			cr[i0] += fr[j] * (1.0 - frac);
			cr[i0 + 1] += fr[j] * frac;
		}
	}
	return coarse;
}

} // namespace detail

/// Residual-stack MLP forecaster with a flat 64-bit parameter vector so the
/// optimizer and serialization can treat the model as one array.
class ForecastModel {
public:
	ForecastModel() = default;

	/// All-zero parameters (useful as a deterministic fixture).
	explicit ForecastModel(const ModelConfig& config) : config_(config) {
		config_.validate();
		build_layout();
		params_.assign(n_params_, 0.0);
	}

	/// Seeded init: every weight and bias uniform in +-sqrt(1/fan_in).
	ForecastModel(const ModelConfig& config, rng::Stream& stream) : ForecastModel(config) {
		for (const auto& block : blocks_) {
			for (const auto& layer : block.layers) {
				const double bound = std::sqrt(1.0 / double(layer.in));
				for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
					params_[layer.w + i] = stream.next_uniform(-bound, bound);
				}
				for (std::size_t i = 0; i < layer.out; ++i) {
					params_[layer.b + i] = stream.next_uniform(-bound, bound);
				}
			}
		}
	}

	const ModelConfig& config() const {
		return config_;
	}
	const std::vector<detail::BlockSpec>& blocks() const {
		return blocks_;
	}
	std::span<const double> parameters() const {
		return params_;
	}
	std::span<double> parameters() {
		return params_;
	}

	void set_parameters(std::vector<double> params) {
		if (params.size() != n_params_) {
			throw std::invalid_argument("ForecastModel: parameter vector size mismatch");
		}
		params_ = std::move(params);
	}

private:
	void build_layout() {
		const std::size_t q = std::size_t(config_.input_size);
		const std::size_t h = std::size_t(config_.horizon);
		const std::size_t u = std::size_t(config_.hidden_units);
		std::size_t offset = 0;
		auto add_layer = [&offset](detail::BlockSpec& block, std::size_t in, std::size_t out) {
			detail::LayerSpec layer;
			layer.in = in;
			layer.out = out;
			layer.w = offset;
			offset += in * out;
			layer.b = offset;
			offset += out;
			block.layers.push_back(layer);
		};
		for (int s = 0; s < config_.n_stacks; ++s) {
			const std::size_t k = std::size_t(config_.pooling_kernels[std::size_t(s)]);
			for (int b = 0; b < config_.blocks_per_stack; ++b) {
				detail::BlockSpec block;
				block.kernel = int(k);
				block.pooled_input = (q + k - 1) / k;
				block.pooled_horizon = (h + k - 1) / k;
				add_layer(block, block.pooled_input, u);
				for (int l = 1; l < config_.hidden_layers; ++l) {
					add_layer(block, u, u);
				}
				add_layer(block, u, block.pooled_input + block.pooled_horizon);
				blocks_.push_back(std::move(block));
			}
		}
		n_params_ = offset;
	}

	ModelConfig config_;
	std::vector<detail::BlockSpec> blocks_;
	std::vector<double> params_;
	std::size_t n_params_ = 0;
};

/// Activation record of one block, kept for the backward pass.
struct BlockTrace {
	Matrix pooled;					 // (B, qk) block input after max pooling
	std::vector<std::size_t> argmax; // flat (B, qk): source column of each pooled max
	std::vector<Matrix> acts;		 // post-ReLU hidden activations, one per hidden layer
	Matrix backcast;				 // (B, q) backcast after re-interpolation
};

/// Forward result: the forecast plus everything backward needs.
struct ForwardPass {
	Matrix forecast; // (B, h) in original units
	std::vector<double> scales;
	Matrix scaled_input;   // (B, q)
	Matrix final_residual; // (B, q) after the last block's backcast
	std::vector<BlockTrace> blocks;
};

namespace detail {

inline void check_finite(const Matrix& m, std::size_t block, const char* what) {
	for (std::size_t r = 0; r < m.rows(); ++r) {
		const double* row = m.row(r);
		for (std::size_t c = 0; c < m.cols(); ++c) {
			if (!std::isfinite(row[c])) {
				throw std::runtime_error("forward: non-finite " + std::string(what) + " in block " +
										 std::to_string(block) + " at batch row " + std::to_string(r));
			}
		}
	}
}

} // namespace detail

/// Run the residual stack: each block consumes the max-pooled running
/// residual, emits a coarse backcast and forecast through its MLP, and both
/// are linearly re-interpolated; the backcast is subtracted from the residual
/// and the forecasts accumulate. Mean window scaling divides each input row
/// by its mean on the way in and multiplies the forecast back on the way out.
inline ForwardPass forward(const ForecastModel& model, const Matrix& inputs) {
	const ModelConfig& cfg = model.config();
	const std::size_t q = std::size_t(cfg.input_size);
	const std::size_t h = std::size_t(cfg.horizon);
	if (inputs.cols() != q || inputs.rows() == 0) {
		throw std::invalid_argument("forward: inputs must be (B, input_size) with B >= 1");
	}
	const std::size_t batch = inputs.rows();
	for (std::size_t r = 0; r < batch; ++r) {
		for (std::size_t c = 0; c < q; ++c) {
			if (!std::isfinite(inputs(r, c))) {
				throw std::invalid_argument("forward: non-finite input at row " + std::to_string(r));
			}
		}
	}

	ForwardPass pass;
	pass.scales.assign(batch, 1.0);
	if (cfg.window_scaling == WindowScaling::mean) {
		for (std::size_t r = 0; r < batch; ++r) {
			double mean = 0.0;
			for (std::size_t c = 0; c < q; ++c) {
				mean += inputs(r, c);
			}
			mean /= double(q);
			pass.scales[r] = mean > kScaleEpsilon ? mean : 1.0;
		}
	}
	pass.scaled_input = Matrix(batch, q);
	for (std::size_t r = 0; r < batch; ++r) {
		for (std::size_t c = 0; c < q; ++c) {
			pass.scaled_input(r, c) = inputs(r, c) / pass.scales[r];
		}
	}

	Matrix residual = pass.scaled_input;
	Matrix forecast_scaled(batch, h);
	const auto params = model.parameters();
	for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
		const auto& spec = model.blocks()[bi];
		BlockTrace trace;
		const std::size_t qk = spec.pooled_input;
		const std::size_t k = std::size_t(spec.kernel);

		trace.pooled = Matrix(batch, qk);
		trace.argmax.resize(batch * qk);
		for (std::size_t r = 0; r < batch; ++r) {
			const double* rr = residual.row(r);
			for (std::size_t p = 0; p < qk; ++p) {
				const std::size_t begin = p * k;
				const std::size_t end = std::min(begin + k, q);
				std::size_t best = begin;
				for (std::size_t j = begin + 1; j < end; ++j) {
					if (rr[j] > rr[best]) {
						best = j;
					}
				}
				trace.pooled(r, p) = rr[best];
				trace.argmax[r * qk + p] = best;
			}
		}

		trace.acts.reserve(spec.layers.size() - 1);
		const Matrix* act = &trace.pooled;
		for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
			const auto& layer = spec.layers[l];
			Matrix z(batch, layer.out);
			detail::linear_forward(*act, params.subspan(layer.w, layer.in * layer.out),
								   params.subspan(layer.b, layer.out), z);
			for (auto& v : z.data()) {
				v = v > 0.0 ? v : 0.0;
			}
			detail::check_finite(z, bi, "activation");
			trace.acts.push_back(std::move(z));
			act = &trace.acts.back();
		}

		const auto& theta_layer = spec.layers.back();
		Matrix theta(batch, theta_layer.out);
		detail::linear_forward(*act, params.subspan(theta_layer.w, theta_layer.in * theta_layer.out),
							   params.subspan(theta_layer.b, theta_layer.out), theta);
		detail::check_finite(theta, bi, "projection");

		Matrix coarse_backcast(batch, qk);
		Matrix coarse_forecast(batch, spec.pooled_horizon);
		for (std::size_t r = 0; r < batch; ++r) {
			const double* tr = theta.row(r);
			for (std::size_t c = 0; c < qk; ++c) {
				coarse_backcast(r, c) = tr[c];
			}
			for (std::size_t c = 0; c < spec.pooled_horizon; ++c) {
				coarse_forecast(r, c) = tr[qk + c];
			}
		}
		trace.backcast = detail::interpolate_rows(coarse_backcast, q);
		const Matrix fc = detail::interpolate_rows(coarse_forecast, h);
		for (std::size_t r = 0; r < batch; ++r) {
			for (std::size_t c = 0; c < q; ++c) {
				residual(r, c) -= trace.backcast(r, c);
			}
			for (std::size_t c = 0; c < h; ++c) {
				forecast_scaled(r, c) += fc(r, c);
			}
		}
		pass.blocks.push_back(std::move(trace));
	}

	pass.final_residual = std::move(residual);
	pass.forecast = Matrix(batch, h);
	for (std::size_t r = 0; r < batch; ++r) {
		for (std::size_t c = 0; c < h; ++c) {
			pass.forecast(r, c) = forecast_scaled(r, c) * pass.scales[r];
		}
	}
	detail::check_finite(pass.forecast, model.blocks().size(), "forecast");
	return pass;
}

/// Mean-reduced training loss over all forecast cells.
inline double loss_value(Loss loss, const Matrix& forecast, const Matrix& targets) {
	if (forecast.rows() != targets.rows() || forecast.cols() != targets.cols()) {
		throw std::invalid_argument("loss_value: shape mismatch");
	}
	if (loss == Loss::smape) {
		return eval::smape(forecast, targets);
	}
	double total = 0.0;
	for (std::size_t i = 0; i < forecast.data().size(); ++i) {
		total += std::abs(forecast.data()[i] - targets.data()[i]);
	}
	return total / double(forecast.data().size());
}

namespace detail {

inline double sign(double v) {
	if (v > 0.0) {
		return 1.0;
	}
	if (v < 0.0) {
		return -1.0;
	}
	return 0.0;
}

/// dLoss/dForecast for the mean-reduced loss, in original units.
inline Matrix loss_gradient(Loss loss, const Matrix& forecast, const Matrix& targets) {
	Matrix grad(forecast.rows(), forecast.cols());
	const double n = double(forecast.rows() * forecast.cols());
	for (std::size_t i = 0; i < grad.data().size(); ++i) {
		const double f = forecast.data()[i];
		const double y = targets.data()[i];
		if (loss == Loss::mae) {
			grad.data()[i] = sign(f - y) / n;
		} else {
			const double half_sum = 0.5 * (std::abs(f) + std::abs(y));
			if (half_sum > eval::kSmapeEpsilon) {
				// d/df |f-y| / D with D = (|f|+|y|)/2, by the quotient rule.
				const double num = std::abs(f - y);
				grad.data()[i] = (sign(f - y) * half_sum - num * 0.5 * sign(f)) / (half_sum * half_sum * n);
			} else {
				grad.data()[i] = sign(f - y) / (eval::kSmapeEpsilon * n);
			}
		}
	}
	return grad;
}

} // namespace detail

/// Exact gradients of the configured loss with respect to every parameter,
/// as one flat vector matching ForecastModel::parameters.
inline std::vector<double> backward(const ForecastModel& model, const ForwardPass& pass, const Matrix& targets) {
	const ModelConfig& cfg = model.config();
	const std::size_t q = std::size_t(cfg.input_size);
	const std::size_t h = std::size_t(cfg.horizon);
	const std::size_t batch = pass.forecast.rows();
	if (targets.rows() != batch || targets.cols() != h) {
		throw std::invalid_argument("backward: targets must match the forecast shape");
	}
	if (pass.blocks.size() != model.blocks().size()) {
		throw std::invalid_argument("backward: pass does not match this model");
	}

	const Matrix dy = detail::loss_gradient(cfg.loss, pass.forecast, targets);
	Matrix dy_scaled(batch, h);
	for (std::size_t r = 0; r < batch; ++r) {
		for (std::size_t c = 0; c < h; ++c) {
			dy_scaled(r, c) = dy(r, c) * pass.scales[r];
		}
	}

	std::vector<double> grad(model.parameters().size(), 0.0);
	const auto params = model.parameters();
	std::span<double> gspan(grad);
	Matrix d_residual(batch, q); // dLoss/d(residual feeding the next block)
	for (std::size_t bi = model.blocks().size(); bi-- > 0;) {
		const auto& spec = model.blocks()[bi];
		const auto& trace = pass.blocks[bi];
		const std::size_t qk = spec.pooled_input;

		// The block's backcast enters the loss only by lowering the residual
		// seen downstream, hence the negated residual gradient.
		Matrix d_coarse_backcast = detail::interpolate_rows_transpose(d_residual, qk);
		for (auto& v : d_coarse_backcast.data()) {
			v = -v;
		}
		const Matrix d_coarse_forecast = detail::interpolate_rows_transpose(dy_scaled, spec.pooled_horizon);

		Matrix d_theta(batch, qk + spec.pooled_horizon);
		for (std::size_t r = 0; r < batch; ++r) {
			for (std::size_t c = 0; c < qk; ++c) {
				d_theta(r, c) = d_coarse_backcast(r, c);
			}
			for (std::size_t c = 0; c < spec.pooled_horizon; ++c) {
				d_theta(r, qk + c) = d_coarse_forecast(r, c);
			}
		}

		const auto& theta_layer = spec.layers.back();
		const Matrix& theta_input = trace.acts.empty() ? trace.pooled : trace.acts.back();
		detail::linear_backward_params(d_theta, theta_input, gspan.subspan(theta_layer.w, theta_layer.in * theta_layer.out),
									   gspan.subspan(theta_layer.b, theta_layer.out));
		Matrix da = detail::linear_backward_input(d_theta, params.subspan(theta_layer.w, theta_layer.in * theta_layer.out),
												  theta_layer.in);

		for (std::size_t l = spec.layers.size() - 1; l-- > 0;) {
			const auto& layer = spec.layers[l];
			const Matrix& act = trace.acts[l];
			for (std::size_t i = 0; i < da.data().size(); ++i) {
				if (act.data()[i] <= 0.0) {
					da.data()[i] = 0.0;
				}
			}
			const Matrix& input = l == 0 ? trace.pooled : trace.acts[l - 1];
			detail::linear_backward_params(da, input, gspan.subspan(layer.w, layer.in * layer.out),
										   gspan.subspan(layer.b, layer.out));
			da = detail::linear_backward_input(da, params.subspan(layer.w, layer.in * layer.out), layer.in);
		}

		// Route the pooled-input gradient back through the max pooling.
		for (std::size_t r = 0; r < batch; ++r) {
			for (std::size_t p = 0; p < qk; ++p) {
				d_residual(r, trace.argmax[r * qk + p]) += da(r, p);
			}
		}
	}
	return grad;
}

} // namespace ondat::model
