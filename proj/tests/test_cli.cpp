#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "ondat/csv.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
	fs::path path;
	TempDir() {
		path = fs::temp_directory_path() /
			   ("ondat-cli-" + std::to_string(::getpid()) + "-" + std::to_string(std::uintptr_t(this)));
		fs::create_directories(path);
	}
	~TempDir() {
		std::error_code ec;
		fs::remove_all(path, ec);
	}
};

std::string slurp(const fs::path& path) {
	std::ifstream in(path, std::ios::binary);
	std::ostringstream out;
	out << in.rdbuf();
	return out.str();
}

struct CliResult {
	int exit_code = -1;
	std::string out;
	std::string err;
};

/// Run the installed binary with the given arguments, capturing both streams.
CliResult run_cli(const std::string& args) {
	static int counter = 0;
	TempDir dir;
	const fs::path out_path = dir.path / ("out" + std::to_string(counter));
	const fs::path err_path = dir.path / ("err" + std::to_string(counter));
	++counter;
	const std::string command =
		std::string("\"") + ONDAT_CLI_PATH + "\" " + args + " > \"" + out_path.string() + "\" 2> \"" + err_path.string() + "\"";
	const int status = std::system(command.c_str());
	CliResult result;
	result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
	result.out = slurp(out_path);
	result.err = slurp(err_path);
	return result;
}

std::string demo_csv() {
	return (fs::path(ONDAT_DATA_DIR) / "demo_monthly.csv").string();
}

} // namespace

TEST_CASE("help and usage errors use the documented exit codes") {
	REQUIRE(run_cli("--help").exit_code == 0);
	REQUIRE(run_cli("decompose --help").exit_code == 0);

	const auto bare = run_cli("");
	REQUIRE(bare.exit_code == 2); // a subcommand is required

	const auto unknown = run_cli("frobnicate");
	REQUIRE(unknown.exit_code == 2);

	const auto missing_required = run_cli("decompose --period 12");
	REQUIRE(missing_required.exit_code == 2);

	const auto missing_file = run_cli("decompose --input /nope/missing.csv --period 12");
	REQUIRE(missing_file.exit_code == 2);
	REQUIRE(missing_file.err.find("/nope/missing.csv") != std::string::npos);

	const auto bad_preset = run_cli("--preset warehouse train --input x --period 12 --horizon 6 --input-size 12");
	REQUIRE(bad_preset.exit_code == 2);
}

TEST_CASE("decompose writes per-series component files that sum to the log input") {
	TempDir dir;
	const auto result =
		run_cli("decompose --input \"" + demo_csv() + "\" --period 12 --output-dir \"" + dir.path.string() + "\"");
	INFO(result.err);
	REQUIRE(result.exit_code == 0);

	const auto corpus = ondat::core::load_corpus(demo_csv(), 12, 1, 1).corpus;
	REQUIRE(corpus.series.size() == 8);
	for (const auto& series : corpus.series) {
		const fs::path file = dir.path / (series.id + ".csv");
		INFO(file.string());
		REQUIRE(fs::exists(file));

		std::ifstream in(file);
		std::string header;
		std::getline(in, header);
		REQUIRE(header == "idx,trend,seasonal,remainder");

		// all demo values are positive, so the components sum to plain log(y)
		std::string line;
		std::size_t idx = 0;
		while (std::getline(in, line)) {
			std::istringstream cells(line);
			std::string cell;
			std::getline(cells, cell, ',');
			REQUIRE(std::stoul(cell) == idx + 1);
			double sum = 0.0;
			for (int c = 0; c < 3; ++c) {
				std::getline(cells, cell, ',');
				sum += std::stod(cell);
			}
			REQUIRE(sum == Catch::Approx(std::log(series.values[idx])).margin(1e-9));
			++idx;
		}
		REQUIRE(idx == series.values.size());
	}
}

TEST_CASE("augment doubles the corpus and the identity method copies values") {
	TempDir dir;
	const fs::path out = dir.path / "augmented.csv";
	const auto result = run_cli("augment --input \"" + demo_csv() + "\" --output \"" + out.string() +
								"\" --period 12 --method identity");
	INFO(result.err);
	REQUIRE(result.exit_code == 0);

	const auto original = ondat::core::load_corpus(demo_csv(), 12, 1, 1).corpus;
	const auto augmented = ondat::core::load_corpus(out.string(), 12, 1, 1).corpus;
	REQUIRE(augmented.series.size() == 2 * original.series.size());
	for (const auto& series : original.series) {
		const auto syn = std::find_if(augmented.series.begin(), augmented.series.end(),
									  [&](const auto& s) { return s.id == series.id + "#syn"; });
		REQUIRE(syn != augmented.series.end());
		REQUIRE(syn->values == series.values);
	}
}

TEST_CASE("augment output is seed-stable") {
	TempDir dir;
	const fs::path a = dir.path / "a.csv";
	const fs::path b = dir.path / "b.csv";
	const fs::path c = dir.path / "c.csv";
	const std::string base = "augment --input \"" + demo_csv() + "\" --period 12 --method mbb --output ";
	REQUIRE(run_cli("--seed 7 " + base + "\"" + a.string() + "\"").exit_code == 0);
	REQUIRE(run_cli("--seed 7 " + base + "\"" + b.string() + "\"").exit_code == 0);
	REQUIRE(run_cli("--seed 8 " + base + "\"" + c.string() + "\"").exit_code == 0);

	REQUIRE(slurp(a) == slurp(b));
	REQUIRE(slurp(a) != slurp(c));

	// synthetic values differ from their sources under the bootstrap
	const auto augmented = ondat::core::load_corpus(a.string(), 12, 1, 1).corpus;
	const auto original = ondat::core::load_corpus(demo_csv(), 12, 1, 1).corpus;
	const auto& first_syn = *std::find_if(augmented.series.begin(), augmented.series.end(),
										  [](const auto& s) { return s.id == "S1#syn"; });
	REQUIRE(first_syn.values != original.series[0].values);
	REQUIRE(first_syn.values.size() == original.series[0].values.size());
}

TEST_CASE("train writes a checkpoint and a training log") {
	TempDir dir;
	const auto result = run_cli("train --input \"" + demo_csv() + "\" --period 12 --horizon 6 --input-size 12" +
								" --output-dir \"" + dir.path.string() +
								"\" --max-steps 60 --hidden-units 8 --batch-size 4");
	INFO(result.err);
	REQUIRE(result.exit_code == 0);
	REQUIRE(result.out.find("SMAPE") != std::string::npos);

	const fs::path checkpoint = dir.path / "checkpoint.json";
	const fs::path log = dir.path / "train_log.jsonl";
	REQUIRE(fs::exists(checkpoint));
	REQUIRE(fs::exists(log));

	const auto j = nlohmann::json::parse(slurp(checkpoint));
	REQUIRE(j.contains("format_version"));
	REQUIRE(j.contains("parameters"));
	REQUIRE(j.at("config").at("input_size") == 12);

	std::ifstream in(log);
	std::string line;
	std::size_t lines = 0;
	while (std::getline(in, line)) {
		REQUIRE_NOTHROW(nlohmann::json::parse(line));
		++lines;
	}
	REQUIRE(lines >= 61); // 60 steps, at least one check, one summary
}

TEST_CASE("benchmark rejects a broken config with every problem listed") {
	TempDir dir;
	const fs::path config = dir.path / "config.json";
	{
		std::ofstream out(config);
		out << R"({
	"datasets": [{"name": "ghost", "path": "/nope/ghost.csv", "period": 12, "horizon": 6, "input_size": 12}],
	"strategies": ["standard", "time_travel"],
	"seeds": [],
	"jobs": 0
})";
	}
	const auto result = run_cli("benchmark --config \"" + config.string() + "\"");
	REQUIRE(result.exit_code == 2);
	REQUIRE(result.err.find("/nope/ghost.csv") != std::string::npos);
	REQUIRE(result.err.find("time_travel") != std::string::npos);
	REQUIRE(result.err.find("seeds") != std::string::npos);
	REQUIRE(result.err.find("jobs") != std::string::npos);

	SECTION("a missing config file is a usage error") {
		const auto gone = run_cli("benchmark --config /nope/absent.json");
		REQUIRE(gone.exit_code == 2);
		REQUIRE(gone.err.find("/nope/absent.json") != std::string::npos);
	}
}

TEST_CASE("benchmark and report round trip on a tiny corpus") {
	TempDir dir;
	const fs::path config = dir.path / "config.json";
	{
		std::ofstream out(config);
		out << R"({
	"datasets": [{"name": "demo", "path": ")" +
				   demo_csv() + R"(", "period": 12, "horizon": 6, "input_size": 12}],
	"strategies": ["standard", "ondat"],
	"seeds": [1],
	"model": {"hidden_units": 8},
	"train": {"max_steps": 30, "val_check_every": 10, "patience": 20, "batch_size": 4}
})";
	}
	const fs::path out_dir = dir.path / "out";
	const auto result =
		run_cli("benchmark --config \"" + config.string() + "\" --output-dir \"" + out_dir.string() + "\"");
	INFO(result.err);
	REQUIRE(result.exit_code == 0);
	REQUIRE(fs::exists(out_dir / "runs.json"));
	REQUIRE(fs::exists(out_dir / "table_scores.txt"));
	REQUIRE(result.out.find("seasonal_naive") != std::string::npos);

	const fs::path rep_dir = dir.path / "rep";
	const auto rep =
		run_cli("report --runs \"" + (out_dir / "runs.json").string() + "\" --output-dir \"" + rep_dir.string() + "\"");
	INFO(rep.err);
	REQUIRE(rep.exit_code == 0);
	REQUIRE(slurp(rep_dir / "table_scores.csv") == slurp(out_dir / "table_scores.csv"));
	REQUIRE(slurp(rep_dir / "table_ranks.json") == slurp(out_dir / "table_ranks.json"));
}
