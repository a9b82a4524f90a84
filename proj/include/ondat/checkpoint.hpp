#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ondat/adam.hpp"
#include "ondat/nhits.hpp"

namespace ondat::model {

constexpr int kCheckpointFormatVersion = 1;

/// Everything needed to resume or deploy a trained model, plus the
/// validation score that justified saving it.
struct Checkpoint {
	ModelConfig config;
	std::vector<double> parameters;
	OptimizerState optimizer;
	double validation_smape = 0.0;
};

namespace detail {

inline nlohmann::json config_to_json(const ModelConfig& c) {
	return nlohmann::json{{"n_stacks", c.n_stacks},
						  {"blocks_per_stack", c.blocks_per_stack},
						  {"hidden_layers", c.hidden_layers},
						  {"hidden_units", c.hidden_units},
						  {"activation", "relu"},
						  {"input_size", c.input_size},
						  {"horizon", c.horizon},
						  {"pooling_kernels", c.pooling_kernels},
						  {"loss", loss_name(c.loss)},
						  {"window_scaling", scaling_name(c.window_scaling)}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
	ModelConfig c;
	c.n_stacks = j.at("n_stacks").get<int>();
	c.blocks_per_stack = j.at("blocks_per_stack").get<int>();
	c.hidden_layers = j.at("hidden_layers").get<int>();
	c.hidden_units = j.at("hidden_units").get<int>();
	if (j.at("activation").get<std::string>() != "relu") {
		throw std::runtime_error("checkpoint: unsupported activation '" + j.at("activation").get<std::string>() + "'");
	}
	c.input_size = j.at("input_size").get<int>();
	c.horizon = j.at("horizon").get<int>();
	c.pooling_kernels = j.at("pooling_kernels").get<std::vector<int>>();
	c.loss = parse_loss(j.at("loss").get<std::string>());
	c.window_scaling = parse_scaling(j.at("window_scaling").get<std::string>());
	c.validate();
	return c;
}

} // namespace detail

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
	nlohmann::json j{{"format_version", kCheckpointFormatVersion},
					 {"config", detail::config_to_json(ckpt.config)},
					 {"parameters", ckpt.parameters},
					 {"optimizer",
					  {{"step", ckpt.optimizer.step},
					   {"base_lr", ckpt.optimizer.base_lr},
					   {"max_steps", ckpt.optimizer.max_steps},
					   {"m", ckpt.optimizer.m},
					   {"v", ckpt.optimizer.v}}},
					 {"validation_smape", ckpt.validation_smape}};
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw std::runtime_error("save_checkpoint: cannot open '" + path + "' for writing");
	}
	out << j.dump(1, '\t') << '\n';
	if (!out) {
		throw std::runtime_error("save_checkpoint: write to '" + path + "' failed");
	}
}

inline Checkpoint load_checkpoint(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw std::runtime_error("load_checkpoint: '" + path + "' is not valid JSON: " + e.what());
	}
	const int version = j.at("format_version").get<int>();
	if (version != kCheckpointFormatVersion) {
		throw std::runtime_error("load_checkpoint: unsupported format version " + std::to_string(version));
	}
	Checkpoint ckpt;
	ckpt.config = detail::config_from_json(j.at("config"));
	ckpt.parameters = j.at("parameters").get<std::vector<double>>();
	const auto& opt = j.at("optimizer");
	ckpt.optimizer.step = opt.at("step").get<std::size_t>();
	ckpt.optimizer.base_lr = opt.at("base_lr").get<double>();
	ckpt.optimizer.max_steps = opt.at("max_steps").get<int>();
	ckpt.optimizer.m = opt.at("m").get<std::vector<double>>();
	ckpt.optimizer.v = opt.at("v").get<std::vector<double>>();
	ckpt.validation_smape = j.at("validation_smape").get<double>();
	return ckpt;
}

/// Rebuild a usable model from a loaded checkpoint.
inline ForecastModel model_from_checkpoint(const Checkpoint& ckpt) {
	ForecastModel model(ckpt.config);
	model.set_parameters(ckpt.parameters);
	return model;
}

} // namespace ondat::model
