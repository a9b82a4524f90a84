// Command-line surface over the library: decompose series into components,
// write augmented corpora, train single models, and run the full benchmark.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ondat/ondat.hpp"

namespace {

namespace fs = std::filesystem;

/// Problems with arguments or referenced inputs; mapped to exit code 2.
struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct GlobalFlags {
	std::uint64_t seed = 1;
	bool seed_set = false;
	int jobs = 1;
	bool jobs_set = false;
	std::string preset = "desk";
	bool preset_set = false;
};

ondat::core::Corpus load_input(const std::string& path, int period, int horizon, int input_size) {
	if (!fs::exists(path)) {
		throw UsageError("input file '" + path + "' does not exist");
	}
	auto loaded = ondat::core::load_corpus(path, period, horizon, input_size);
	if (loaded.dropped_short > 0) {
		std::cerr << "note: dropped " << loaded.dropped_short << " series shorter than "
				  << ondat::core::Corpus::min_length(input_size, horizon) << " observations\n";
	}
	return std::move(loaded.corpus);
}

struct DecomposeArgs {
	std::string input;
	std::string output_dir = "decomposition";
	int period = 0;
	int seasonal_window = ondat::decomp::StlParams::kPeriodic;
	int trend_window = 0;  // 0 = default for the period
	int lowpass_window = 0;
	int inner = 2;
	int outer = 0;
};

int cmd_decompose(const DecomposeArgs& args) {
	const auto corpus = load_input(args.input, args.period, 1, 1);
	ondat::decomp::StlParams params = ondat::decomp::StlParams::defaults(args.period);
	params.seasonal_window = args.seasonal_window;
	if (args.trend_window > 0) {
		params.trend_window = args.trend_window;
	}
	if (args.lowpass_window > 0) {
		params.lowpass_window = args.lowpass_window;
	}
	params.inner_iterations = args.inner;
	params.outer_iterations = args.outer;
	params.validate();

	fs::create_directories(args.output_dir);
	std::size_t failures = 0;
	for (const auto& series : corpus.series) {
		try {
			const auto d = ondat::decomp::decompose_series(series, params);
			const auto path =
				(fs::path(args.output_dir) / (ondat::eval::detail::sanitize_filename(series.id) + ".csv")).string();
			std::ofstream out(path, std::ios::binary);
			if (!out) {
				throw std::runtime_error("cannot open '" + path + "' for writing");
			}
			out << "idx,trend,seasonal,remainder\n";
			for (std::size_t i = 0; i < d.trend.size(); ++i) {
				out << i + 1 << ',' << ondat::core::format_double(d.trend[i]) << ','
					<< ondat::core::format_double(d.seasonal[i]) << ','
					<< ondat::core::format_double(d.remainder[i]) << '\n';
			}
			if (!out) {
				throw std::runtime_error("write to '" + path + "' failed");
			}
		} catch (const std::exception& e) {
			std::cerr << "decompose: " << series.id << ": " << e.what() << '\n';
			++failures;
		}
	}
	std::cout << "decomposed " << corpus.series.size() - failures << "/" << corpus.series.size() << " series into "
			  << args.output_dir << "\n";
	return failures == corpus.series.size() ? 1 : 0;
}

struct AugmentArgs {
	std::string input;
	std::string output;
	std::string method = "mbb";
	int period = 0;
	int block_size = 0;
	int multiplicity = 1;
};

int cmd_augment(const AugmentArgs& args, const GlobalFlags& global) {
	const auto corpus = load_input(args.input, args.period, 1, 1);
	ondat::rng::Stream stream(global.seed);
	ondat::augment::AugmenterConfig config;
	config.method = ondat::augment::parse_method(args.method);
	config.block_size = args.block_size;
	config.stream = &stream;
	const auto augmented = ondat::augment::augment_corpus(corpus, config, args.multiplicity);
	ondat::core::save_corpus(augmented, args.output);
	std::cout << "wrote " << augmented.series.size() << " series (" << corpus.series.size() << " original + "
			  << augmented.series.size() - corpus.series.size() << " synthetic) to " << args.output << "\n";
	return 0;
}

struct TrainArgs {
	std::string input;
	std::string output_dir = "train-out";
	std::string strategy = "ondat";
	int period = 0;
	int horizon = 0;
	int input_size = 0;
	int max_steps = -1;		// -1 = preset value
	int hidden_units = -1;	// -1 = preset value
	int batch_size = -1;
	double learning_rate = -1.0;
};

int cmd_train(const TrainArgs& args, const GlobalFlags& global) {
	const auto corpus = load_input(args.input, args.period, args.horizon, args.input_size);

	ondat::model::ModelConfig mc;
	ondat::train::TrainConfig tc;
	ondat::cli::apply_preset(global.preset, mc, tc);
	mc.input_size = args.input_size;
	mc.horizon = args.horizon;
	if (args.hidden_units > 0) {
		mc.hidden_units = args.hidden_units;
	}
	if (args.max_steps >= 0) {
		tc.max_steps = args.max_steps;
	}
	if (args.batch_size > 0) {
		tc.batch_size = args.batch_size;
	}
	if (args.learning_rate > 0.0) {
		tc.learning_rate = args.learning_rate;
	}
	tc.seed = global.seed;

	const auto strategy = ondat::train::make_strategy(ondat::train::parse_strategy(args.strategy));
	const auto result = ondat::train::fit(corpus, strategy, mc, tc);

	fs::create_directories(args.output_dir);
	ondat::train::write_train_log(result.log, (fs::path(args.output_dir) / "train_log.jsonl").string());
	ondat::model::Checkpoint ckpt;
	ckpt.config = result.model.config();
	ckpt.parameters.assign(result.model.parameters().begin(), result.model.parameters().end());
	ckpt.validation_smape = result.log.checkpoint_smape;
	ondat::model::save_checkpoint(ckpt, (fs::path(args.output_dir) / "checkpoint.json").string());

	const double test = ondat::eval::score_on_test(result.model, corpus);
	std::cout << "strategy " << args.strategy << ", " << result.log.steps.size() << " steps, checkpoint at step "
			  << result.log.checkpoint_step << "\n";
	std::cout << "validation SMAPE " << ondat::eval::detail::format_cell(result.log.checkpoint_smape, 5) << " ("
			  << ondat::eval::detail::format_cell(100.0 * result.log.checkpoint_smape, 3) << "%)\n";
	std::cout << "test SMAPE       " << ondat::eval::detail::format_cell(test, 5) << " ("
			  << ondat::eval::detail::format_cell(100.0 * test, 3) << "%)\n";
	return 0;
}

struct BenchmarkArgs {
	std::string config_path;
	std::string output_dir; // empty = value from the config file
};

int cmd_benchmark(const BenchmarkArgs& args, const GlobalFlags& global) {
	if (!fs::exists(args.config_path)) {
		throw UsageError("config file '" + args.config_path + "' does not exist");
	}
	nlohmann::json j;
	{
		std::ifstream in(args.config_path, std::ios::binary);
		try {
			in >> j;
		} catch (const nlohmann::json::exception& e) {
			throw ondat::cli::ConfigError(
				{"config file '" + args.config_path + "' is not valid JSON: " + std::string(e.what())});
		}
	}
	if (global.preset_set) {
		j["preset"] = global.preset;
	}
	if (global.jobs_set) {
		j["jobs"] = global.jobs;
	}
	if (global.seed_set) {
		j["seeds"] = std::vector<std::uint64_t>{global.seed};
	}
	auto experiment = ondat::cli::parse_experiment(j);
	if (!args.output_dir.empty()) {
		experiment.output_dir = args.output_dir;
	}

	std::vector<ondat::eval::NamedCorpus> corpora;
	for (const auto& d : experiment.datasets) {
		corpora.push_back({d.name, load_input(d.path, d.period, d.horizon, d.input_size)});
	}

	ondat::eval::BenchmarkConfig bc;
	for (const auto& name : experiment.strategies) {
		bc.strategies.push_back(ondat::train::parse_strategy(name));
	}
	bc.seeds = experiment.seeds;
	bc.model = experiment.model;
	bc.train = experiment.train;
	bc.jobs = experiment.jobs;
	bc.decomp_cache = experiment.decomp_cache;
	bc.log_dir = (fs::path(experiment.output_dir) / "logs").string();

	const auto report = ondat::eval::run_benchmark(corpora, bc);
	ondat::eval::write_report_files(report, experiment.output_dir, experiment.timing_reference);
	std::cout << ondat::eval::format_scores_table(report);
	std::size_t failures = 0;
	for (const auto& e : report.entries) {
		if (e.failed) {
			std::cerr << "run failed: " << e.corpus << "/" << e.strategy << "/seed " << e.seed << ": " << e.error
					  << '\n';
			++failures;
		}
	}
	std::cout << "wrote report files to " << experiment.output_dir << "\n";
	return failures == 0 ? 0 : 1;
}

struct ReportArgs {
	std::string runs_path;
	std::string output_dir = "report-out";
	std::string reference = "ondat";
};

int cmd_report(const ReportArgs& args) {
	if (!fs::exists(args.runs_path)) {
		throw UsageError("runs file '" + args.runs_path + "' does not exist");
	}
	const auto report = ondat::eval::load_report(args.runs_path);
	ondat::eval::write_report_files(report, args.output_dir, args.reference);
	std::cout << ondat::eval::format_scores_table(report);
	std::cout << "wrote report files to " << args.output_dir << "\n";
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"STL + moving-blocks-bootstrap data augmentation and benchmarks for global time-series forecasting"};
	app.require_subcommand(1);

	GlobalFlags global;
	auto* seed_opt = app.add_option("--seed", global.seed, "Base RNG seed (benchmark: replaces the seed list)")
						 ->envname("ONDAT_SEED");
	auto* jobs_opt = app.add_option("--jobs", global.jobs, "Max parallel benchmark runs")->envname("ONDAT_JOBS");
	auto* preset_opt = app.add_option("--preset", global.preset, "Scale preset: paper or desk")
						   ->check(CLI::IsMember({"paper", "desk"}))
						   ->envname("ONDAT_PRESET");

	DecomposeArgs dec_args;
	auto* dec = app.add_subcommand("decompose", "Write per-series trend/seasonal/remainder CSV files");
	dec->fallthrough();
	dec->add_option("--input", dec_args.input, "Long-format corpus CSV (unique_id,ds,y)")->required();
	dec->add_option("--period", dec_args.period, "Seasonal period m")->required()->check(CLI::PositiveNumber);
	dec->add_option("--output-dir", dec_args.output_dir, "Directory for component CSV files");
	dec->add_option("--seasonal-window", dec_args.seasonal_window, "Seasonal loess window (0 = periodic)");
	dec->add_option("--trend-window", dec_args.trend_window, "Trend loess window (0 = default for m)");
	dec->add_option("--lowpass-window", dec_args.lowpass_window, "Low-pass loess window (0 = default for m)");
	dec->add_option("--inner", dec_args.inner, "Inner loop iterations");
	dec->add_option("--outer", dec_args.outer, "Outer robustness iterations");

	AugmentArgs aug_args;
	auto* aug = app.add_subcommand("augment", "Write a corpus extended with bootstrapped synthetic series");
	aug->fallthrough();
	aug->add_option("--input", aug_args.input, "Long-format corpus CSV")->required();
	aug->add_option("--output", aug_args.output, "Output corpus CSV")->required();
	aug->add_option("--period", aug_args.period, "Seasonal period m")->required()->check(CLI::PositiveNumber);
	aug->add_option("--method", aug_args.method, "mbb, fixed or identity")
		->check(CLI::IsMember({"mbb", "fixed", "identity"}));
	aug->add_option("--block-size", aug_args.block_size, "Bootstrap block length (0 = period)");
	aug->add_option("--multiplicity", aug_args.multiplicity, "Synthetic copies per series")
		->check(CLI::PositiveNumber);

	TrainArgs train_args;
	auto* trn = app.add_subcommand("train", "Fit one model and write its checkpoint and training log");
	trn->fallthrough();
	trn->add_option("--input", train_args.input, "Long-format corpus CSV")->required();
	trn->add_option("--period", train_args.period, "Seasonal period m")->required()->check(CLI::PositiveNumber);
	trn->add_option("--horizon", train_args.horizon, "Forecast horizon h")->required()->check(CLI::PositiveNumber);
	trn->add_option("--input-size", train_args.input_size, "Model input window q")
		->required()
		->check(CLI::PositiveNumber);
	trn->add_option("--strategy", train_args.strategy,
					"standard, da_apriori, ondat, ondat_train_only, ondat_val_only or ondat_fixed");
	trn->add_option("--output-dir", train_args.output_dir, "Directory for checkpoint.json and train_log.jsonl");
	trn->add_option("--max-steps", train_args.max_steps, "Override preset training steps");
	trn->add_option("--hidden-units", train_args.hidden_units, "Override preset hidden width");
	trn->add_option("--batch-size", train_args.batch_size, "Series per training batch");
	trn->add_option("--learning-rate", train_args.learning_rate, "Base Adam learning rate");

	BenchmarkArgs bench_args;
	auto* bench = app.add_subcommand("benchmark", "Run the corpus x strategy x seed benchmark from a config file");
	bench->fallthrough();
	bench->add_option("--config", bench_args.config_path, "Experiment config JSON")->required();
	bench->add_option("--output-dir", bench_args.output_dir, "Override the config's output directory");

	ReportArgs report_args;
	auto* rep = app.add_subcommand("report", "Regenerate table files from a saved runs.json");
	rep->fallthrough();
	rep->add_option("--runs", report_args.runs_path, "runs.json written by a benchmark")->required();
	rep->add_option("--output-dir", report_args.output_dir, "Directory for the regenerated tables");
	rep->add_option("--reference", report_args.reference, "Timing reference strategy");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::CallForVersion& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return 2;
	}
	global.seed_set = seed_opt->count() > 0;
	global.jobs_set = jobs_opt->count() > 0;
	global.preset_set = preset_opt->count() > 0;

	try {
		if (*dec) {
			return cmd_decompose(dec_args);
		}
		if (*aug) {
			return cmd_augment(aug_args, global);
		}
		if (*trn) {
			return cmd_train(train_args, global);
		}
		if (*bench) {
			return cmd_benchmark(bench_args, global);
		}
		if (*rep) {
			return cmd_report(report_args);
		}
	} catch (const UsageError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	} catch (const ondat::cli::ConfigError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
