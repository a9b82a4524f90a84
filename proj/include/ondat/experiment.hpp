#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ondat/nhits.hpp"
#include "ondat/train.hpp"

namespace ondat::cli {

struct DatasetSpec {
	std::string name;
	std::string path;
	int period = 0;
	int horizon = 0;
	int input_size = 0;
};

/// Experiment description loaded from a JSON config file. The preset seeds
/// model/train defaults, which explicit "model"/"train" entries override.
struct ExperimentConfig {
	std::string preset = "desk";
	std::vector<DatasetSpec> datasets;
	std::vector<std::string> strategies{"standard", "da_apriori", "ondat"};
	std::vector<std::uint64_t> seeds{1, 2, 3};
	std::string output_dir = "ondat-out";
	std::string timing_reference = "ondat";
	int jobs = 1;
	bool decomp_cache = false;
	model::ModelConfig model;
	train::TrainConfig train;
};

/// Carries every problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
public:
	explicit ConfigError(std::vector<std::string> problems)
		: std::runtime_error(join(problems)), problems_(std::move(problems)) {}

	const std::vector<std::string>& problems() const { return problems_; }

private:
	static std::string join(const std::vector<std::string>& problems) {
		std::ostringstream out;
		out << "invalid experiment config (" << problems.size() << (problems.size() == 1 ? " problem" : " problems")
			<< "):";
		for (const auto& p : problems) {
			out << "\n  - " << p;
		}
		return out.str();
	}

	std::vector<std::string> problems_;
};

/// The paper preset carries the full benchmark training scale; desk is a
/// small configuration sized for laptop-scale runs and CI.
inline void apply_preset(std::string_view preset, model::ModelConfig& model, train::TrainConfig& train) {
	if (preset == "paper") {
		model.hidden_units = 512;
		train.max_steps = 1500;
	} else if (preset == "desk") {
		model.hidden_units = 64;
		train.max_steps = 300;
	} else {
		throw std::invalid_argument("unknown preset '" + std::string(preset) + "' (expected paper or desk)");
	}
}

/// Returns every problem found; empty means valid.
inline std::vector<std::string> validate_experiment(const ExperimentConfig& config) {
	std::vector<std::string> problems;
	if (config.preset != "paper" && config.preset != "desk") {
		problems.push_back("preset: unknown preset '" + config.preset + "' (expected paper or desk)");
	}
	if (config.datasets.empty()) {
		problems.push_back("datasets: at least one dataset is required");
	}
	std::set<std::string> names;
	for (std::size_t i = 0; i < config.datasets.size(); ++i) {
		const auto& d = config.datasets[i];
		const std::string label = "datasets[" + std::to_string(i) + "]";
		if (d.name.empty()) {
			problems.push_back(label + ": name must be nonempty");
		} else if (!names.insert(d.name).second) {
			problems.push_back(label + ": duplicate dataset name '" + d.name + "'");
		}
		if (d.path.empty()) {
			problems.push_back(label + ": path must be nonempty");
		} else if (!std::filesystem::exists(d.path)) {
			problems.push_back(label + ": file '" + d.path + "' does not exist");
		}
		if (d.period < 1) {
			problems.push_back(label + ": period must be >= 1");
		}
		if (d.horizon < 1) {
			problems.push_back(label + ": horizon must be >= 1");
		}
		if (d.input_size < 1) {
			problems.push_back(label + ": input_size must be >= 1");
		}
	}
	if (config.strategies.empty()) {
		problems.push_back("strategies: at least one strategy is required");
	}
	for (const auto& name : config.strategies) {
		try {
			train::parse_strategy(name);
		} catch (const std::exception& e) {
			problems.push_back(std::string("strategies: ") + e.what());
		}
	}
	if (config.seeds.empty()) {
		problems.push_back("seeds: at least one seed is required");
	}
	if (config.output_dir.empty()) {
		problems.push_back("output_dir: must be nonempty");
	}
	if (config.jobs < 1) {
		problems.push_back("jobs: must be >= 1");
	}
	try {
		model::ModelConfig probe = config.model;
		probe.input_size = config.datasets.empty() ? 1 : std::max(1, config.datasets.front().input_size);
		probe.horizon = config.datasets.empty() ? 1 : std::max(1, config.datasets.front().horizon);
		probe.validate();
	} catch (const std::exception& e) {
		problems.push_back(std::string("model: ") + e.what());
	}
	try {
		config.train.validate();
	} catch (const std::exception& e) {
		problems.push_back(std::string("train: ") + e.what());
	}
	return problems;
}

namespace detail {

inline bool expect_object(const nlohmann::json& j, const std::string& label, std::vector<std::string>& problems) {
	if (!j.is_object()) {
		problems.push_back(label + ": expected a JSON object");
		return false;
	}
	return true;
}

inline void parse_model(const nlohmann::json& j, model::ModelConfig& model, std::vector<std::string>& problems) {
	if (!expect_object(j, "model", problems)) {
		return;
	}
	for (const auto& [key, value] : j.items()) {
		try {
			if (key == "n_stacks") {
				model.n_stacks = value.get<int>();
			} else if (key == "blocks_per_stack") {
				model.blocks_per_stack = value.get<int>();
			} else if (key == "hidden_layers") {
				model.hidden_layers = value.get<int>();
			} else if (key == "hidden_units") {
				model.hidden_units = value.get<int>();
			} else if (key == "activation") {
				if (value.get<std::string>() != "relu") {
					problems.push_back("model.activation: only 'relu' is supported");
				}
			} else if (key == "pooling_kernels") {
				model.pooling_kernels = value.get<std::vector<int>>();
			} else if (key == "loss") {
				model.loss = model::parse_loss(value.get<std::string>());
			} else if (key == "window_scaling") {
				model.window_scaling = model::parse_scaling(value.get<std::string>());
			} else {
				problems.push_back("model." + key + ": unknown key");
			}
		} catch (const std::exception& e) {
			problems.push_back("model." + key + ": " + e.what());
		}
	}
}

inline void parse_train(const nlohmann::json& j, train::TrainConfig& train, std::vector<std::string>& problems) {
	if (!expect_object(j, "train", problems)) {
		return;
	}
	for (const auto& [key, value] : j.items()) {
		try {
			if (key == "max_steps") {
				train.max_steps = value.get<int>();
			} else if (key == "batch_size") {
				train.batch_size = value.get<int>();
			} else if (key == "val_check_every") {
				train.val_check_every = value.get<int>();
			} else if (key == "patience") {
				train.patience = value.get<int>();
			} else if (key == "learning_rate") {
				train.learning_rate = value.get<double>();
			} else if (key == "seed") {
				problems.push_back("train.seed: per-run seeds belong in the top-level 'seeds' list");
			} else {
				problems.push_back("train." + key + ": unknown key");
			}
		} catch (const std::exception& e) {
			problems.push_back("train." + key + ": " + e.what());
		}
	}
}

inline void parse_dataset(const nlohmann::json& j, std::size_t index, std::vector<DatasetSpec>& datasets,
						  std::vector<std::string>& problems) {
	const std::string label = "datasets[" + std::to_string(index) + "]";
	if (!expect_object(j, label, problems)) {
		return;
	}
	DatasetSpec spec;
	for (const auto& [key, value] : j.items()) {
		try {
			if (key == "name") {
				spec.name = value.get<std::string>();
			} else if (key == "path") {
				spec.path = value.get<std::string>();
			} else if (key == "period") {
				spec.period = value.get<int>();
			} else if (key == "horizon") {
				spec.horizon = value.get<int>();
			} else if (key == "input_size") {
				spec.input_size = value.get<int>();
			} else {
				problems.push_back(label + "." + key + ": unknown key");
			}
		} catch (const std::exception& e) {
			problems.push_back(label + "." + key + ": " + e.what());
		}
	}
	datasets.push_back(std::move(spec));
}

} // namespace detail

/// Parse an experiment config, applying the preset before explicit
/// model/train overrides. Throws ConfigError listing every problem found.
inline ExperimentConfig parse_experiment(const nlohmann::json& j) {
	std::vector<std::string> problems;
	ExperimentConfig config;
	if (!j.is_object()) {
		throw ConfigError({"top level: expected a JSON object"});
	}

	if (j.contains("preset")) {
		try {
			config.preset = j.at("preset").get<std::string>();
		} catch (const std::exception& e) {
			problems.push_back(std::string("preset: ") + e.what());
		}
	}
	try {
		apply_preset(config.preset, config.model, config.train);
	} catch (const std::exception& e) {
		problems.push_back(e.what());
	}

	for (const auto& [key, value] : j.items()) {
		try {
			if (key == "preset") {
				continue;
			} else if (key == "datasets") {
				config.datasets.clear();
				if (!value.is_array()) {
					problems.push_back("datasets: expected a JSON array");
					continue;
				}
				for (std::size_t i = 0; i < value.size(); ++i) {
					detail::parse_dataset(value[i], i, config.datasets, problems);
				}
			} else if (key == "strategies") {
				config.strategies = value.get<std::vector<std::string>>();
			} else if (key == "seeds") {
				config.seeds = value.get<std::vector<std::uint64_t>>();
			} else if (key == "output_dir") {
				config.output_dir = value.get<std::string>();
			} else if (key == "timing_reference") {
				config.timing_reference = value.get<std::string>();
			} else if (key == "jobs") {
				config.jobs = value.get<int>();
			} else if (key == "decomp_cache") {
				config.decomp_cache = value.get<bool>();
			} else if (key == "model") {
				detail::parse_model(value, config.model, problems);
			} else if (key == "train") {
				detail::parse_train(value, config.train, problems);
			} else {
				problems.push_back(key + ": unknown key");
			}
		} catch (const std::exception& e) {
			problems.push_back(key + ": " + e.what());
		}
	}

	const auto semantic = validate_experiment(config);
	problems.insert(problems.end(), semantic.begin(), semantic.end());
	if (!problems.empty()) {
		throw ConfigError(std::move(problems));
	}
	return config;
}

inline ExperimentConfig load_experiment(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw ConfigError({"cannot open config file '" + path + "'"});
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw ConfigError({"config file '" + path + "' is not valid JSON: " + std::string(e.what())});
	}
	return parse_experiment(j);
}

} // namespace ondat::cli
