#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ondat/checkpoint.hpp"
#include "ondat/metrics.hpp"
#include "ondat/seasonal_naive.hpp"
#include "ondat/series.hpp"
#include "ondat/synthetic.hpp"
#include "ondat/train.hpp"

namespace ondat::eval {

constexpr std::string_view kBaselineName = "seasonal_naive";

/// One (corpus, strategy, seed) result; the baseline appears as a strategy.
struct RunEntry {
	std::string corpus;
	std::string strategy;
	std::uint64_t seed = 0;
	double test_smape = 0.0;
	double val_smape = 0.0;
	double total_seconds = 0.0;
	double augment_seconds = 0.0;
	double train_seconds = 0.0;
	double validation_seconds = 0.0;
	bool failed = false;
	std::string error;
};

struct RunReport {
	std::vector<RunEntry> entries;
};

inline void save_report(const RunReport& report, const std::string& path) {
	nlohmann::json entries = nlohmann::json::array();
	for (const auto& e : report.entries) {
		entries.push_back({{"corpus", e.corpus},
						   {"strategy", e.strategy},
						   {"seed", e.seed},
						   {"test_smape", e.test_smape},
						   {"val_smape", e.val_smape},
						   {"total_seconds", e.total_seconds},
						   {"augment_seconds", e.augment_seconds},
						   {"train_seconds", e.train_seconds},
						   {"validation_seconds", e.validation_seconds},
						   {"failed", e.failed},
						   {"error", e.error}});
	}
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw std::runtime_error("save_report: cannot open '" + path + "' for writing");
	}
	out << nlohmann::json{{"entries", entries}}.dump(1, '\t') << '\n';
	if (!out) {
		throw std::runtime_error("save_report: write to '" + path + "' failed");
	}
}

inline RunReport load_report(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw std::runtime_error("load_report: cannot open '" + path + "'");
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw std::runtime_error("load_report: '" + path + "' is not valid JSON: " + e.what());
	}
	RunReport report;
	for (const auto& je : j.at("entries")) {
		RunEntry e;
		e.corpus = je.at("corpus").get<std::string>();
		e.strategy = je.at("strategy").get<std::string>();
		e.seed = je.at("seed").get<std::uint64_t>();
		e.test_smape = je.at("test_smape").get<double>();
		e.val_smape = je.at("val_smape").get<double>();
		e.total_seconds = je.at("total_seconds").get<double>();
		e.augment_seconds = je.at("augment_seconds").get<double>();
		e.train_seconds = je.at("train_seconds").get<double>();
		e.validation_seconds = je.at("validation_seconds").get<double>();
		e.failed = je.at("failed").get<bool>();
		e.error = je.at("error").get<std::string>();
		report.entries.push_back(std::move(e));
	}
	return report;
}

/// Per-(corpus, strategy) means over seeds, preserving first-appearance
/// order of corpora and strategies. Failed entries are excluded.
struct AggregateScores {
	std::vector<std::string> corpora;
	std::vector<std::string> strategies;
	std::map<std::pair<std::string, std::string>, double> mean_test;
	std::map<std::pair<std::string, std::string>, double> mean_val;
	std::map<std::pair<std::string, std::string>, double> mean_seconds;
};

inline AggregateScores aggregate(const RunReport& report) {
	AggregateScores agg;
	std::map<std::pair<std::string, std::string>, std::size_t> counts;
	for (const auto& e : report.entries) {
		if (e.failed) {
			continue;
		}
		if (std::find(agg.corpora.begin(), agg.corpora.end(), e.corpus) == agg.corpora.end()) {
			agg.corpora.push_back(e.corpus);
		}
		if (std::find(agg.strategies.begin(), agg.strategies.end(), e.strategy) == agg.strategies.end()) {
			agg.strategies.push_back(e.strategy);
		}
		const auto key = std::make_pair(e.corpus, e.strategy);
		agg.mean_test[key] += e.test_smape;
		agg.mean_val[key] += e.val_smape;
		agg.mean_seconds[key] += e.total_seconds;
		counts[key] += 1;
	}
	for (auto& [key, value] : agg.mean_test) {
		value /= double(counts[key]);
	}
	for (auto& [key, value] : agg.mean_val) {
		value /= double(counts[key]);
	}
	for (auto& [key, value] : agg.mean_seconds) {
		value /= double(counts[key]);
	}
	return agg;
}

/// Average rank per strategy: rank 1 is the lowest SMAPE in each dataset,
/// exact ties share the mean of their tied ranks, averaged over the datasets
/// where the strategy appears.
inline std::map<std::string, double> rank_table(const std::vector<std::map<std::string, double>>& per_dataset) {
	std::map<std::string, double> rank_sum;
	std::map<std::string, std::size_t> rank_count;
	for (const auto& scores : per_dataset) {
		if (scores.size() < 2) {
			throw std::invalid_argument("rank_table: need at least 2 strategies per dataset");
		}
		std::vector<std::pair<double, std::string>> order;
		order.reserve(scores.size());
		for (const auto& [strategy, score] : scores) {
			order.emplace_back(score, strategy);
		}
		std::sort(order.begin(), order.end());
		std::size_t i = 0;
		while (i < order.size()) {
			std::size_t j = i;
			while (j + 1 < order.size() && order[j + 1].first == order[i].first) {
				++j;
			}
			const double shared = 0.5 * double(i + 1 + j + 1);
			for (std::size_t k = i; k <= j; ++k) {
				rank_sum[order[k].second] += shared;
				rank_count[order[k].second] += 1;
			}
			i = j + 1;
		}
	}
	std::map<std::string, double> average;
	for (const auto& [strategy, sum] : rank_sum) {
		average[strategy] = sum / double(rank_count[strategy]);
	}
	return average;
}

inline std::vector<std::map<std::string, double>> scores_by_dataset(const AggregateScores& agg) {
	std::vector<std::map<std::string, double>> per_dataset;
	for (const auto& corpus : agg.corpora) {
		std::map<std::string, double> scores;
		for (const auto& strategy : agg.strategies) {
			const auto it = agg.mean_test.find({corpus, strategy});
			if (it != agg.mean_test.end()) {
				scores[strategy] = it->second;
			}
		}
		per_dataset.push_back(std::move(scores));
	}
	return per_dataset;
}

/// Validation minus test SMAPE per (strategy, corpus) and the per-strategy
/// median over corpora; positive means validation scored worse.
struct ValidationGap {
	std::map<std::string, std::map<std::string, double>> per_dataset; // strategy -> corpus -> gap
	std::map<std::string, double> median;
};

inline ValidationGap validation_gap(const RunReport& report) {
	const AggregateScores agg = aggregate(report);
	ValidationGap gap;
	for (const auto& strategy : agg.strategies) {
		std::vector<double> gaps;
		for (const auto& corpus : agg.corpora) {
			const auto key = std::make_pair(corpus, strategy);
			const auto val = agg.mean_val.find(key);
			const auto test = agg.mean_test.find(key);
			if (val != agg.mean_val.end() && test != agg.mean_test.end()) {
				const double g = val->second - test->second;
				gap.per_dataset[strategy][corpus] = g;
				gaps.push_back(g);
			}
		}
		if (!gaps.empty()) {
			std::sort(gaps.begin(), gaps.end());
			const std::size_t mid = gaps.size() / 2;
			gap.median[strategy] = gaps.size() % 2 == 1 ? gaps[mid] : 0.5 * (gaps[mid - 1] + gaps[mid]);
		}
	}
	return gap;
}

/// Percent execution-time difference per strategy against a reference,
/// 100 * (t - t_ref) / t_ref averaged over corpora; negative means quicker.
struct TimingReport {
	std::string reference;
	std::map<std::string, double> mean_seconds;			// per strategy over all its runs
	std::map<std::string, double> percent_vs_reference; // averaged over corpora
};

inline TimingReport timing_report(const RunReport& report, const std::string& reference) {
	const AggregateScores agg = aggregate(report);
	TimingReport timing;
	timing.reference = reference;
	for (const auto& strategy : agg.strategies) {
		double total = 0.0;
		std::size_t n = 0;
		for (const auto& corpus : agg.corpora) {
			const auto it = agg.mean_seconds.find({corpus, strategy});
			if (it != agg.mean_seconds.end()) {
				total += it->second;
				++n;
			}
		}
		if (n > 0) {
			timing.mean_seconds[strategy] = total / double(n);
		}
	}
	for (const auto& strategy : agg.strategies) {
		double total_pct = 0.0;
		std::size_t n = 0;
		for (const auto& corpus : agg.corpora) {
			const auto it = agg.mean_seconds.find({corpus, strategy});
			const auto ref = agg.mean_seconds.find({corpus, reference});
			if (it != agg.mean_seconds.end() && ref != agg.mean_seconds.end() && ref->second > 0.0) {
				total_pct += 100.0 * (it->second - ref->second) / ref->second;
				++n;
			}
		}
		if (n > 0) {
			timing.percent_vs_reference[strategy] = total_pct / double(n);
		}
	}
	return timing;
}

struct NamedCorpus {
	std::string name;
	core::Corpus corpus;
};

/// Cross-product benchmark settings; input_size/horizon of `model` and the
/// seed of `train` are overridden per corpus and per run.
struct BenchmarkConfig {
	std::vector<train::StrategyKind> strategies;
	std::vector<std::uint64_t> seeds;
	model::ModelConfig model;
	train::TrainConfig train;
	int jobs = 1;
	bool include_baseline = true;
	bool decomp_cache = false; // reuse per-series decompositions across batches
	std::string log_dir;	   // nonempty: write one TrainLog JSONL per fitted run
};

namespace detail {

inline std::string sanitize_filename(std::string_view name) {
	std::string out;
	out.reserve(name.size());
	for (const char c : name) {
		const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
						c == '-' || c == '_';
		out.push_back(ok ? c : '_');
	}
	return out;
}

/// Batched one-window-per-series forecast: inputs are the last q
/// observations of [0, end_of_history), targets the h that follow.
inline std::pair<Matrix, Matrix> test_windows(const core::Corpus& corpus, const core::SplitCorpus& split) {
	const std::size_t q = std::size_t(corpus.input_size);
	const std::size_t h = std::size_t(corpus.horizon);
	Matrix inputs(corpus.series.size(), q);
	Matrix targets(corpus.series.size(), h);
	for (std::size_t r = 0; r < corpus.series.size(); ++r) {
		const auto& values = corpus.series[r].values;
		const std::size_t end = split.ranges[r].val_end;
		for (std::size_t c = 0; c < q; ++c) {
			inputs(r, c) = values[end - q + c];
		}
		for (std::size_t c = 0; c < h; ++c) {
			targets(r, c) = values[end + c];
		}
	}
	return {std::move(inputs), std::move(targets)};
}

} // namespace detail

/// SMAPE of the model's one-shot forecast over the held-out last h
/// observations, forecasting from the q observations that precede them.
inline double score_on_test(const model::ForecastModel& fitted, const core::Corpus& corpus) {
	const core::SplitCorpus split = core::split(corpus);
	const auto [inputs, targets] = detail::test_windows(corpus, split);
	return smape(model::forward(fitted, inputs).forecast, targets);
}

namespace detail {

inline RunEntry fitted_run(const NamedCorpus& named, train::StrategyKind kind, std::uint64_t seed,
						   const BenchmarkConfig& config, augment::DecompCache* cache) {
	RunEntry entry;
	entry.corpus = named.name;
	entry.strategy = std::string(train::strategy_name(kind));
	entry.seed = seed;
	const auto start = std::chrono::steady_clock::now();
	try {
		model::ModelConfig mc = config.model;
		mc.input_size = named.corpus.input_size;
		mc.horizon = named.corpus.horizon;
		train::TrainConfig tc = config.train;
		tc.seed = seed;
		train::Strategy strategy = train::make_strategy(kind);
		strategy.augmenter.cache = cache;

		train::FitResult fitted = train::fit(named.corpus, strategy, mc, tc);
		if (!std::isfinite(fitted.log.checkpoint_smape)) {
			throw std::runtime_error("no validation check ran (max_steps below val_check_every)");
		}
		if (!config.log_dir.empty()) {
			const std::string stem = sanitize_filename(named.name) + "_" + sanitize_filename(entry.strategy) +
									 "_seed" + std::to_string(seed) + ".jsonl";
			train::write_train_log(fitted.log, (std::filesystem::path(config.log_dir) / stem).string());
		}
		entry.test_smape = score_on_test(fitted.model, named.corpus);
		entry.val_smape = fitted.log.checkpoint_smape;
		entry.augment_seconds = fitted.log.augment_seconds;
		entry.train_seconds = fitted.log.train_seconds;
		entry.validation_seconds = fitted.log.validation_seconds;
	} catch (const std::exception& e) {
		entry.failed = true;
		entry.error = e.what();
	}
	entry.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	return entry;
}

inline RunEntry baseline_run(const NamedCorpus& named, std::uint64_t seed) {
	RunEntry entry;
	entry.corpus = named.name;
	entry.strategy = std::string(kBaselineName);
	entry.seed = seed;
	const auto start = std::chrono::steady_clock::now();
	try {
		const core::Corpus& corpus = named.corpus;
		const core::SplitCorpus split = core::split(corpus);
		const std::size_t h = std::size_t(corpus.horizon);
		Matrix test_forecast(corpus.series.size(), h);
		Matrix test_actual(corpus.series.size(), h);
		Matrix val_forecast(corpus.series.size(), h);
		Matrix val_actual(corpus.series.size(), h);
		for (std::size_t r = 0; r < corpus.series.size(); ++r) {
			const auto& s = corpus.series[r];
			const auto& range = split.ranges[r];
			const auto test = model::seasonal_naive(std::span(s.values).first(range.val_end), s.period, corpus.horizon);
			const auto val = model::seasonal_naive(std::span(s.values).first(range.train_end), s.period, corpus.horizon);
			for (std::size_t c = 0; c < h; ++c) {
				test_forecast(r, c) = test[c];
				test_actual(r, c) = s.values[range.val_end + c];
				val_forecast(r, c) = val[c];
				val_actual(r, c) = s.values[range.train_end + c];
			}
		}
		entry.test_smape = smape(test_forecast, test_actual);
		entry.val_smape = smape(val_forecast, val_actual);
	} catch (const std::exception& e) {
		entry.failed = true;
		entry.error = e.what();
	}
	entry.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	return entry;
}

} // namespace detail

/// Run the full (corpus x strategy x seed) cross product, appending one
/// seasonal-naive baseline entry per (corpus, seed). Individual run failures
/// are recorded in their entries rather than aborting the benchmark.
inline RunReport run_benchmark(std::span<const NamedCorpus> corpora, const BenchmarkConfig& config) {
	if (corpora.empty() || config.strategies.empty() || config.seeds.empty()) {
		throw std::invalid_argument("run_benchmark: corpora, strategies and seeds must be nonempty");
	}
	if (config.jobs < 1) {
		throw std::invalid_argument("run_benchmark: jobs must be >= 1");
	}
	if (!config.log_dir.empty()) {
		std::filesystem::create_directories(config.log_dir);
	}

	struct Task {
		const NamedCorpus* corpus = nullptr;
		train::StrategyKind kind = train::StrategyKind::standard;
		std::uint64_t seed = 0;
		bool baseline = false;
		augment::DecompCache* cache = nullptr;
	};
	std::vector<std::unique_ptr<augment::DecompCache>> caches;
	std::vector<Task> tasks;
	for (const auto& named : corpora) {
		augment::DecompCache* cache = nullptr;
		if (config.decomp_cache) {
			caches.push_back(std::make_unique<augment::DecompCache>());
			cache = caches.back().get();
		}
		for (const auto kind : config.strategies) {
			for (const auto seed : config.seeds) {
				tasks.push_back(Task{&named, kind, seed, false, cache});
			}
		}
		if (config.include_baseline) {
			for (const auto seed : config.seeds) {
				tasks.push_back(Task{&named, train::StrategyKind::standard, seed, true, nullptr});
			}
		}
	}

	RunReport report;
	report.entries.resize(tasks.size());
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		while (true) {
			const std::size_t i = next.fetch_add(1);
			if (i >= tasks.size()) {
				return;
			}
			const Task& task = tasks[i];
			report.entries[i] = task.baseline ? detail::baseline_run(*task.corpus, task.seed)
											  : detail::fitted_run(*task.corpus, task.kind, task.seed, config, task.cache);
		}
	};
	const std::size_t n_threads = std::min<std::size_t>(std::size_t(config.jobs), tasks.size());
	if (n_threads <= 1) {
		worker();
	} else {
		std::vector<std::thread> threads;
		threads.reserve(n_threads);
		for (std::size_t i = 0; i < n_threads; ++i) {
			threads.emplace_back(worker);
		}
		for (auto& t : threads) {
			t.join();
		}
	}
	return report;
}

namespace detail {

inline std::string format_cell(double value, int decimals) {
	std::ostringstream out;
	out << std::fixed << std::setprecision(decimals) << value;
	return out.str();
}

inline std::string format_table(const std::vector<std::string>& header,
								const std::vector<std::vector<std::string>>& rows) {
	std::vector<std::size_t> width(header.size());
	for (std::size_t c = 0; c < header.size(); ++c) {
		width[c] = header[c].size();
	}
	for (const auto& row : rows) {
		for (std::size_t c = 0; c < row.size(); ++c) {
			width[c] = std::max(width[c], row[c].size());
		}
	}
	std::ostringstream out;
	auto emit = [&](const std::vector<std::string>& row) {
		for (std::size_t c = 0; c < row.size(); ++c) {
			out << (c == 0 ? "" : "  ") << std::setw(int(width[c])) << (c == 0 ? std::left : std::right) << row[c];
		}
		out << '\n';
	};
	emit(header);
	std::string rule;
	for (std::size_t c = 0; c < header.size(); ++c) {
		rule += std::string(width[c], '-') + (c + 1 < header.size() ? "  " : "");
	}
	out << rule << '\n';
	for (const auto& row : rows) {
		emit(row);
	}
	return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw std::runtime_error("cannot open '" + path + "' for writing");
	}
	out << content;
	if (!out) {
		throw std::runtime_error("write to '" + path + "' failed");
	}
}

inline std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
	std::ostringstream out;
	auto emit = [&](const std::vector<std::string>& row) {
		for (std::size_t c = 0; c < row.size(); ++c) {
			out << (c == 0 ? "" : ",") << row[c];
		}
		out << '\n';
	};
	emit(header);
	for (const auto& row : rows) {
		emit(row);
	}
	return out.str();
}

} // namespace detail

/// Human-readable scores table: mean test SMAPE per corpus and strategy,
/// plus per-strategy averages and average ranks.
inline std::string format_scores_table(const RunReport& report) {
	const AggregateScores agg = aggregate(report);
	const auto ranks = agg.corpora.empty() ? std::map<std::string, double>{}
										   : rank_table(scores_by_dataset(agg));
	std::vector<std::string> header{"corpus"};
	header.insert(header.end(), agg.strategies.begin(), agg.strategies.end());
	std::vector<std::vector<std::string>> rows;
	for (const auto& corpus : agg.corpora) {
		std::vector<std::string> row{corpus};
		for (const auto& strategy : agg.strategies) {
			const auto it = agg.mean_test.find({corpus, strategy});
			row.push_back(it == agg.mean_test.end() ? "-" : detail::format_cell(it->second, 5));
		}
		rows.push_back(std::move(row));
	}
	std::vector<std::string> avg_row{"average"};
	std::vector<std::string> rank_row{"avg rank"};
	for (const auto& strategy : agg.strategies) {
		double total = 0.0;
		std::size_t n = 0;
		for (const auto& corpus : agg.corpora) {
			const auto it = agg.mean_test.find({corpus, strategy});
			if (it != agg.mean_test.end()) {
				total += it->second;
				++n;
			}
		}
		avg_row.push_back(n == 0 ? "-" : detail::format_cell(total / double(n), 5));
		const auto r = ranks.find(strategy);
		rank_row.push_back(r == ranks.end() ? "-" : detail::format_cell(r->second, 2));
	}
	rows.push_back(std::move(avg_row));
	rows.push_back(std::move(rank_row));
	return detail::format_table(header, rows);
}

/// Write runs.json plus the four table files, each as .json, .csv and .txt.
inline void write_report_files(const RunReport& report, const std::string& out_dir, const std::string& reference) {
	namespace fs = std::filesystem;
	fs::create_directories(out_dir);
	const auto path = [&out_dir](const std::string& name) { return (fs::path(out_dir) / name).string(); };

	save_report(report, path("runs.json"));
	const AggregateScores agg = aggregate(report);
	if (agg.corpora.empty()) {
		throw std::runtime_error("write_report_files: every run failed, nothing to tabulate");
	}
	const auto ranks = rank_table(scores_by_dataset(agg));
	const ValidationGap gap = validation_gap(report);
	const std::string timing_reference = agg.mean_test.count({agg.corpora.front(), reference}) ? reference
																							   : agg.strategies.front();
	const TimingReport timing = timing_report(report, timing_reference);

	{
		nlohmann::json scores;
		std::vector<std::string> header{"corpus"};
		header.insert(header.end(), agg.strategies.begin(), agg.strategies.end());
		std::vector<std::vector<std::string>> rows;
		for (const auto& corpus : agg.corpora) {
			std::vector<std::string> row{corpus};
			for (const auto& strategy : agg.strategies) {
				const auto it = agg.mean_test.find({corpus, strategy});
				scores[corpus][strategy] = it == agg.mean_test.end() ? nlohmann::json() : nlohmann::json(it->second);
				row.push_back(it == agg.mean_test.end() ? "" : detail::format_cell(it->second, 5));
			}
			rows.push_back(std::move(row));
		}
		detail::write_text_file(path("table_scores.json"), nlohmann::json{{"test_smape", scores}}.dump(1, '\t') + "\n");
		detail::write_text_file(path("table_scores.csv"), detail::to_csv(header, rows));
		detail::write_text_file(path("table_scores.txt"), format_scores_table(report));
	}
	{
		nlohmann::json jranks;
		std::vector<std::vector<std::string>> rows;
		for (const auto& strategy : agg.strategies) {
			const auto it = ranks.find(strategy);
			if (it != ranks.end()) {
				jranks[strategy] = it->second;
				rows.push_back({strategy, detail::format_cell(it->second, 3)});
			}
		}
		detail::write_text_file(path("table_ranks.json"), nlohmann::json{{"average_rank", jranks}}.dump(1, '\t') + "\n");
		detail::write_text_file(path("table_ranks.csv"), detail::to_csv({"strategy", "average_rank"}, rows));
		detail::write_text_file(path("table_ranks.txt"), detail::format_table({"strategy", "average_rank"}, rows));
	}
	{
		nlohmann::json jgap;
		std::vector<std::string> header{"strategy"};
		for (const auto& corpus : agg.corpora) {
			header.push_back(corpus);
		}
		header.push_back("median");
		std::vector<std::vector<std::string>> rows;
		for (const auto& strategy : agg.strategies) {
			std::vector<std::string> row{strategy};
			const auto s = gap.per_dataset.find(strategy);
			for (const auto& corpus : agg.corpora) {
				std::string cell;
				if (s != gap.per_dataset.end()) {
					const auto c = s->second.find(corpus);
					if (c != s->second.end()) {
						jgap[strategy][corpus] = c->second;
						cell = detail::format_cell(c->second, 5);
					}
				}
				row.push_back(std::move(cell));
			}
			const auto m = gap.median.find(strategy);
			if (m != gap.median.end()) {
				jgap[strategy]["median"] = m->second;
				row.push_back(detail::format_cell(m->second, 5));
			} else {
				row.push_back("");
			}
			rows.push_back(std::move(row));
		}
		detail::write_text_file(path("table_gap.json"),
								nlohmann::json{{"validation_minus_test", jgap}}.dump(1, '\t') + "\n");
		detail::write_text_file(path("table_gap.csv"), detail::to_csv(header, rows));
		detail::write_text_file(path("table_gap.txt"), detail::format_table(header, rows));
	}
	{
		nlohmann::json jtiming{{"reference", timing.reference}};
		std::vector<std::vector<std::string>> rows;
		for (const auto& strategy : agg.strategies) {
			const auto sec = timing.mean_seconds.find(strategy);
			const auto pct = timing.percent_vs_reference.find(strategy);
			if (sec == timing.mean_seconds.end() || pct == timing.percent_vs_reference.end()) {
				continue;
			}
			jtiming["mean_seconds"][strategy] = sec->second;
			jtiming["percent_vs_reference"][strategy] = pct->second;
			rows.push_back({strategy, detail::format_cell(sec->second, 3), detail::format_cell(pct->second, 3)});
		}
		detail::write_text_file(path("table_timing.json"), jtiming.dump(1, '\t') + "\n");
		detail::write_text_file(path("table_timing.csv"),
								detail::to_csv({"strategy", "mean_seconds", "percent_vs_" + timing.reference}, rows));
		detail::write_text_file(path("table_timing.txt"),
								detail::format_table({"strategy", "mean_seconds", "percent_vs_" + timing.reference}, rows));
	}
}

} // namespace ondat::eval
