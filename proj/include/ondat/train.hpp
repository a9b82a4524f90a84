#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ondat/adam.hpp"
#include "ondat/augment.hpp"
#include "ondat/metrics.hpp"
#include "ondat/nhits.hpp"
#include "ondat/rng.hpp"
#include "ondat/series.hpp"

namespace ondat::train {

enum class StrategyKind {
	standard,		 // no augmentation anywhere
	da_apriori,		 // one synthetic per series materialized before training
	ondat,			 // fresh synthetics per training batch and validation check
	ondat_train_only,
	ondat_val_only,
	ondat_fixed, // on-the-fly but with the order-free bootstrap
};

inline StrategyKind parse_strategy(std::string_view name) {
	if (name == "standard") {
		return StrategyKind::standard;
	}
	if (name == "da_apriori") {
		return StrategyKind::da_apriori;
	}
	if (name == "ondat") {
		return StrategyKind::ondat;
	}
	if (name == "ondat_train_only") {
		return StrategyKind::ondat_train_only;
	}
	if (name == "ondat_val_only") {
		return StrategyKind::ondat_val_only;
	}
	if (name == "ondat_fixed") {
		return StrategyKind::ondat_fixed;
	}
	throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

inline std::string_view strategy_name(StrategyKind kind) {
	switch (kind) {
	case StrategyKind::standard:
		return "standard";
	case StrategyKind::da_apriori:
		return "da_apriori";
	case StrategyKind::ondat:
		return "ondat";
	case StrategyKind::ondat_train_only:
		return "ondat_train_only";
	case StrategyKind::ondat_val_only:
		return "ondat_val_only";
	case StrategyKind::ondat_fixed:
		return "ondat_fixed";
	}
	throw std::logic_error("strategy_name: bad enum value");
}

/// A training strategy: when augmentation happens plus how to synthesize.
/// The augmenter's stream/cache handles are filled in by fit itself.
struct Strategy {
	StrategyKind kind = StrategyKind::standard;
	augment::AugmenterConfig augmenter;

	bool augments_train_batches() const {
		return kind == StrategyKind::ondat || kind == StrategyKind::ondat_train_only ||
			   kind == StrategyKind::ondat_fixed;
	}
	bool augments_validation() const {
		return kind == StrategyKind::ondat || kind == StrategyKind::ondat_val_only ||
			   kind == StrategyKind::ondat_fixed;
	}
	bool is_apriori() const {
		return kind == StrategyKind::da_apriori;
	}

	void validate() const {
		using augment::Method;
		const Method m = augmenter.method;
		switch (kind) {
		case StrategyKind::standard:
			if (m != Method::identity) {
				throw std::invalid_argument("Strategy: standard must carry the identity augmenter");
			}
			break;
		case StrategyKind::ondat_fixed:
			if (m != Method::fixed_bootstrap) {
				throw std::invalid_argument("Strategy: ondat_fixed must carry the fixed bootstrap");
			}
			break;
		default:
			if (m == Method::fixed_bootstrap) {
				throw std::invalid_argument("Strategy: only ondat_fixed may carry the fixed bootstrap");
			}
			break;
		}
	}
};

/// Convenience constructor wiring the conventional augmenter per kind.
inline Strategy make_strategy(StrategyKind kind) {
	Strategy s;
	s.kind = kind;
	switch (kind) {
	case StrategyKind::standard:
		s.augmenter.method = augment::Method::identity;
		break;
	case StrategyKind::ondat_fixed:
		s.augmenter.method = augment::Method::fixed_bootstrap;
		break;
	default:
		s.augmenter.method = augment::Method::mbb;
		break;
	}
	return s;
}

struct TrainConfig {
	int max_steps = 1500;
	int batch_size = 32;	// series per batch
	int val_check_every = 50; // steps between validation checks
	int patience = 50;		// steps without improvement before stopping
	double learning_rate = 1e-3;
	std::uint64_t seed = 0;

	void validate() const {
		if (max_steps < 0) {
			throw std::invalid_argument("TrainConfig: max_steps must be >= 0");
		}
		if (batch_size < 1 || val_check_every < 1 || patience < 1) {
			throw std::invalid_argument("TrainConfig: batch_size, val_check_every and patience must be >= 1");
		}
		if (!(learning_rate > 0.0)) {
			throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
		}
	}
};

enum class StopReason { max_steps, early_stop };

/// Full record of one training run.
struct TrainLog {
	struct Step {
		std::size_t step = 0;
		double loss = 0.0;
		std::size_t n_windows = 0;
	};
	struct Check {
		std::size_t step = 0;
		double smape = 0.0;
		std::size_t n_windows = 0;
		bool improved = false;
	};

	std::vector<Step> steps;
	std::vector<Check> checks;
	std::size_t checkpoint_step = 0;
	double checkpoint_smape = std::numeric_limits<double>::infinity();
	StopReason stop_reason = StopReason::max_steps;
	double augment_seconds = 0.0;	 // synthesis, training and validation sides
	double train_seconds = 0.0;		 // embedding, forward, backward, optimizer
	double validation_seconds = 0.0; // embedding, forward, scoring
};

/// One JSON object per line: every step, every check, then a summary record.
inline void write_train_log(const TrainLog& log, const std::string& path) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw std::runtime_error("write_train_log: cannot open '" + path + "' for writing");
	}
	for (const auto& s : log.steps) {
		out << nlohmann::json{{"type", "step"}, {"step", s.step}, {"loss", s.loss}, {"windows", s.n_windows}}.dump()
			<< '\n';
	}
	for (const auto& c : log.checks) {
		out << nlohmann::json{{"type", "check"},
							  {"step", c.step},
							  {"smape", c.smape},
							  {"windows", c.n_windows},
							  {"improved", c.improved}}
				   .dump()
			<< '\n';
	}
	nlohmann::json summary{{"type", "summary"},
						   {"steps", log.steps.size()},
						   {"checkpoint_step", log.checkpoint_step},
						   {"stop_reason", log.stop_reason == StopReason::early_stop ? "early_stop" : "max_steps"},
						   {"augment_seconds", log.augment_seconds},
						   {"train_seconds", log.train_seconds},
						   {"validation_seconds", log.validation_seconds}};
	if (std::isfinite(log.checkpoint_smape)) {
		summary["checkpoint_smape"] = log.checkpoint_smape;
	}
	out << summary.dump() << '\n';
	if (!out) {
		throw std::runtime_error("write_train_log: write to '" + path + "' failed");
	}
}

/// Train-range views of every corpus series, in corpus order.
inline std::vector<core::Series> make_train_views(const core::Corpus& corpus, const core::SplitCorpus& split) {
	std::vector<core::Series> views;
	views.reserve(corpus.series.size());
	for (std::size_t i = 0; i < corpus.series.size(); ++i) {
		views.push_back(corpus.series[i].view(0, split.ranges[i].train_end));
	}
	return views;
}

/// Train+validation views (everything except the test block).
inline std::vector<core::Series> make_val_views(const core::Corpus& corpus, const core::SplitCorpus& split) {
	std::vector<core::Series> views;
	views.reserve(corpus.series.size());
	for (std::size_t i = 0; i < corpus.series.size(); ++i) {
		views.push_back(corpus.series[i].view(0, split.ranges[i].val_end));
	}
	return views;
}

/// Sample batch_size series uniformly without replacement (clamped to the
/// pool size); sampling is with replacement across successive calls.
inline std::vector<core::Series> make_batch(std::span<const core::Series> train_views, int batch_size,
											rng::Stream& stream) {
	if (train_views.empty()) {
		throw std::invalid_argument("make_batch: empty training pool");
	}
	if (batch_size < 1) {
		throw std::invalid_argument("make_batch: batch_size must be >= 1");
	}
	const std::size_t n = train_views.size();
	const std::size_t take = std::min(std::size_t(batch_size), n);
	std::vector<std::size_t> index(n);
	std::iota(index.begin(), index.end(), std::size_t{0});
	std::vector<core::Series> batch;
	batch.reserve(take);
	for (std::size_t i = 0; i < take; ++i) {
		const std::size_t j = i + std::size_t(stream.next_below(n - i));
		std::swap(index[i], index[j]);
		batch.push_back(train_views[index[i]]);
	}
	return batch;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

struct StepResult {
	double loss = 0.0;
	std::size_t n_windows = 0;
	double augment_seconds = 0.0;
	double train_seconds = 0.0;
};

/// One optimizer step: augment the batch when the strategy says so, window
/// the (possibly doubled) series, then forward, backward and Adam. A batch
/// whose series are all too short to window is skipped without an update.
inline StepResult train_step(model::ForecastModel& model, std::span<const core::Series> batch,
							 const Strategy& strategy, model::OptimizerState& opt, rng::Stream& augment_stream) {
	if (batch.empty()) {
		throw std::invalid_argument("train_step: empty batch");
	}
	StepResult result;
	const int q = model.config().input_size;
	const int h = model.config().horizon;

	std::vector<core::Series> augmented;
	std::span<const core::Series> views = batch;
	if (strategy.augments_train_batches()) {
		const auto start = std::chrono::steady_clock::now();
		augment::AugmenterConfig cfg = strategy.augmenter;
		cfg.stream = &augment_stream;
		augmented = augment::augment_batch(batch, cfg);
		views = augmented;
		result.augment_seconds = detail::seconds_since(start);
	}

	const auto start = std::chrono::steady_clock::now();
	const core::WindowSet windows = core::embed_all(views, q, h);
	result.n_windows = windows.size();
	if (windows.size() == 0) {
		return result;
	}
	const model::ForwardPass pass = model::forward(model, windows.inputs);
	result.loss = model::loss_value(model.config().loss, pass.forecast, windows.targets);
	const std::vector<double> grad = model::backward(model, pass, windows.targets);
	model::adam_step(model, grad, opt);
	result.train_seconds = detail::seconds_since(start);
	return result;
}

struct ValidationResult {
	double smape = 0.0;
	std::size_t n_windows = 0;
	double augment_seconds = 0.0;
	double score_seconds = 0.0;
};

/// Score the model on one window per series: inputs are the last q
/// observations before each view's final h, targets those final h. For
/// validation-augmenting strategies the views are doubled with fresh
/// synthetics first, so synthetic windows are scored too.
inline ValidationResult validate(const model::ForecastModel& model, std::span<const core::Series> val_views,
								 const Strategy& strategy, rng::Stream& augment_stream) {
	if (val_views.empty()) {
		throw std::invalid_argument("validate: empty validation pool");
	}
	ValidationResult result;
	const std::size_t q = std::size_t(model.config().input_size);
	const std::size_t h = std::size_t(model.config().horizon);

	std::vector<core::Series> augmented;
	std::span<const core::Series> views = val_views;
	if (strategy.augments_validation()) {
		const auto start = std::chrono::steady_clock::now();
		augment::AugmenterConfig cfg = strategy.augmenter;
		cfg.stream = &augment_stream;
		augmented = augment::augment_batch(val_views, cfg);
		views = augmented;
		result.augment_seconds = detail::seconds_since(start);
	}

	const auto start = std::chrono::steady_clock::now();
	std::vector<const core::Series*> usable;
	usable.reserve(views.size());
	for (const auto& v : views) {
		if (v.length() >= q + h) {
			usable.push_back(&v);
		}
	}
	if (usable.empty()) {
		throw std::runtime_error("validate: no series long enough for a validation window");
	}
	Matrix inputs(usable.size(), q);
	Matrix targets(usable.size(), h);
	for (std::size_t r = 0; r < usable.size(); ++r) {
		const auto& values = usable[r]->values;
		const std::size_t t = values.size();
		for (std::size_t c = 0; c < q; ++c) {
			inputs(r, c) = values[t - h - q + c];
		}
		for (std::size_t c = 0; c < h; ++c) {
			targets(r, c) = values[t - h + c];
		}
	}
	const model::ForwardPass pass = model::forward(model, inputs);
	result.smape = eval::smape(pass.forecast, targets);
	result.n_windows = usable.size();
	result.score_seconds = detail::seconds_since(start);
	return result;
}

struct FitResult {
	model::ForecastModel model;
	TrainLog log;
};

/// Full training run. Apriori strategies first merge one synthetic per
/// series into both pools; the loop then samples series batches, steps the
/// optimizer, validates every val_check_every steps, checkpoints on strict
/// improvement, and stops at max_steps or once patience steps pass without
/// improvement. Returns the checkpointed model, not the final one.
inline FitResult fit(const core::Corpus& corpus, const Strategy& strategy, const model::ModelConfig& model_config,
					 const TrainConfig& train_config) {
	strategy.validate();
	train_config.validate();
	model_config.validate();
	corpus.validate();
	if (model_config.input_size != corpus.input_size || model_config.horizon != corpus.horizon) {
		throw std::invalid_argument("fit: model input_size/horizon must match the corpus");
	}
	const core::SplitCorpus split = core::split(corpus);

	rng::Stream base(train_config.seed);
	rng::Stream init_stream = base.derive("init");
	rng::Stream batch_stream = base.derive("batch");
	rng::Stream train_aug_stream = base.derive("augment-train");
	rng::Stream val_aug_stream = base.derive("augment-val");
	rng::Stream da_stream = base.derive("da");

	std::vector<core::Series> train_pool = make_train_views(corpus, split);
	std::vector<core::Series> val_pool = make_val_views(corpus, split);

	FitResult result{model::ForecastModel(model_config, init_stream), TrainLog{}};
	TrainLog& log = result.log;

	if (strategy.is_apriori()) {
		const auto start = std::chrono::steady_clock::now();
		augment::AugmenterConfig cfg = strategy.augmenter;
		cfg.stream = &da_stream;
		const std::vector<core::Series> doubled = augment::augment_batch(val_pool, cfg);
		const std::size_t h = std::size_t(corpus.horizon);
		for (std::size_t i = val_pool.size(); i < doubled.size(); ++i) {
			const core::Series& syn = doubled[i];
			train_pool.push_back(syn.view(0, syn.length() - h));
			val_pool.push_back(syn);
		}
		log.augment_seconds += detail::seconds_since(start);
	}

	model::OptimizerState opt;
	opt.base_lr = train_config.learning_rate;
	opt.max_steps = train_config.max_steps;

	std::vector<double> best_params;
	std::size_t best_step = 0;
	double best_smape = std::numeric_limits<double>::infinity();

	for (int step = 1; step <= train_config.max_steps; ++step) {
		const std::vector<core::Series> batch = make_batch(train_pool, train_config.batch_size, batch_stream);
		const StepResult sr = train_step(result.model, batch, strategy, opt, train_aug_stream);
		log.steps.push_back(TrainLog::Step{std::size_t(step), sr.loss, sr.n_windows});
		log.augment_seconds += sr.augment_seconds;
		log.train_seconds += sr.train_seconds;

		if (step % train_config.val_check_every == 0) {
			const ValidationResult vr = validate(result.model, val_pool, strategy, val_aug_stream);
			log.augment_seconds += vr.augment_seconds;
			log.validation_seconds += vr.score_seconds;
			const bool improved = vr.smape < best_smape;
			log.checks.push_back(TrainLog::Check{std::size_t(step), vr.smape, vr.n_windows, improved});
			if (improved) {
				best_smape = vr.smape;
				best_step = std::size_t(step);
				best_params.assign(result.model.parameters().begin(), result.model.parameters().end());
			} else if (std::size_t(step) - best_step >= std::size_t(train_config.patience)) {
				log.stop_reason = StopReason::early_stop;
				break;
			}
		}
	}

	if (!best_params.empty()) {
		result.model.set_parameters(std::move(best_params));
		log.checkpoint_step = best_step;
		log.checkpoint_smape = best_smape;
	}
	return result;
}

} // namespace ondat::train
