#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ondat/log.hpp"
#include "ondat/series.hpp"

namespace ondat::core {

/// Result of load_corpus: the usable corpus plus drop metadata.
struct LoadReport {
	Corpus corpus;
	std::size_t dropped_short = 0; // series removed for t < q+2h
	std::vector<std::string> dropped_ids;
};

namespace detail {

inline double parse_double_strict(std::string_view text, std::size_t line_no) {
	double value = 0.0;
	const char* first = text.data();
	const char* last = first + text.size();
	auto [ptr, ec] = std::from_chars(first, last, value);
	if (ec != std::errc() || ptr != last || text.empty()) {
		throw std::runtime_error("line " + std::to_string(line_no) + ": bad numeric value '" + std::string(text) + "'");
	}
	return value;
}

/// Shortest decimal text that round-trips back to the same double.
inline std::string format_double(double value) {
	char buf[32];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
	if (ec != std::errc()) {
		throw std::runtime_error("format_double: conversion failed");
	}
	return std::string(buf, ptr);
}

} // namespace detail

using detail::format_double;

/// Read a long CSV (`unique_id,ds,y`) into a Corpus. Rows of one id are
/// ordered by their `ds` strings (opaque sort keys, no calendar semantics);
/// first-appearance order of ids is preserved. Series shorter than q+2h are
/// dropped with a warning and recorded in the report.
inline LoadReport load_corpus(const std::string& path, int period, int horizon, int input_size) {
	if (period < 1 || horizon < 1 || input_size < 1) {
		throw std::invalid_argument("load_corpus: period, horizon and input_size must be >= 1");
	}
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw std::runtime_error("load_corpus: cannot open '" + path + "'");
	}

	std::string line;
	std::size_t line_no = 0;
	if (!std::getline(in, line)) {
		throw std::runtime_error("load_corpus: '" + path + "' is empty");
	}
	++line_no;
	if (!line.empty() && line.back() == '\r') {
		line.pop_back();
	}
	if (line != "unique_id,ds,y") {
		throw std::runtime_error("line 1: expected header 'unique_id,ds,y', got '" + line + "'");
	}

	struct Row {
		std::string ds;
		double y;
		std::size_t file_order;
	};
	std::vector<std::string> id_order;
	std::vector<std::vector<Row>> rows_by_id;
	// Linear id lookup would be quadratic over 600+ series; keep a sorted index.
	std::vector<std::pair<std::string, std::size_t>> id_index;

	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (line.empty()) {
			continue;
		}
		const auto c1 = line.find(',');
		const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
		if (c1 == std::string::npos || c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
			throw std::runtime_error("line " + std::to_string(line_no) + ": expected 3 comma-separated fields");
		}
		std::string id = line.substr(0, c1);
		std::string ds = line.substr(c1 + 1, c2 - c1 - 1);
		if (id.empty()) {
			throw std::runtime_error("line " + std::to_string(line_no) + ": empty unique_id");
		}
		const double y = detail::parse_double_strict(std::string_view(line).substr(c2 + 1), line_no);

		auto it = std::lower_bound(id_index.begin(), id_index.end(), id,
								   [](const auto& entry, const std::string& key) { return entry.first < key; });
		std::size_t slot;
		if (it == id_index.end() || it->first != id) {
			slot = id_order.size();
			id_index.insert(it, {id, slot});
			id_order.push_back(id);
			rows_by_id.emplace_back();
		} else {
			slot = it->second;
		}
		rows_by_id[slot].push_back(Row{std::move(ds), y, rows_by_id[slot].size()});
	}

	LoadReport report;
	report.corpus.horizon = horizon;
	report.corpus.input_size = input_size;
	const std::size_t need = Corpus::min_length(input_size, horizon);
	for (std::size_t i = 0; i < id_order.size(); ++i) {
		auto& rows = rows_by_id[i];
		std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.ds < b.ds; });
		if (rows.size() < need) {
			++report.dropped_short;
			report.dropped_ids.push_back(id_order[i]);
			log::warn("load_corpus: dropped series '" + id_order[i] + "' (" + std::to_string(rows.size()) +
					  " observations, need " + std::to_string(need) + ")");
			continue;
		}
		Series s;
		s.id = id_order[i];
		s.period = period;
		s.values.reserve(rows.size());
		for (const auto& r : rows) {
			s.values.push_back(r.y);
		}
		report.corpus.series.push_back(std::move(s));
	}
	if (report.corpus.series.empty()) {
		throw std::runtime_error("load_corpus: '" + path + "' contains no usable series");
	}
	report.corpus.validate();
	return report;
}

/// Write a corpus as long CSV. `ds` is a zero-padded row counter per series,
/// chosen wide enough that lexicographic order equals temporal order, so a
/// reload reproduces the corpus exactly.
inline void save_corpus(const Corpus& corpus, const std::string& path) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw std::runtime_error("save_corpus: cannot open '" + path + "' for writing");
	}
	out << "unique_id,ds,y\n";
	for (const auto& s : corpus.series) {
		std::size_t width = 1;
		for (std::size_t n = s.length(); n >= 10; n /= 10) {
			++width;
		}
		for (std::size_t i = 0; i < s.length(); ++i) {
			std::string ds = std::to_string(i + 1);
			ds.insert(0, width - ds.size(), '0');
			out << s.id << ',' << ds << ',' << detail::format_double(s.values[i]) << '\n';
		}
	}
	if (!out) {
		throw std::runtime_error("save_corpus: write to '" + path + "' failed");
	}
}

} // namespace ondat::core
