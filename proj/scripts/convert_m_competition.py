#!/usr/bin/env python3
"""Convert a Monash-style .tsf archive into the long CSV this repo loads.

The M competition collections (M1, M3, ...) are published as .tsf files in
the Monash Time Series Forecasting Repository (https://forecastingdata.org,
e.g. m1_quarterly_dataset.tsf). This script rewrites one of those files as
unique_id,ds,y rows, with ds a zero-padded 1-based position so that plain
string ordering matches time order:

	python3 scripts/convert_m_competition.py m1_quarterly_dataset.tsf data/m1_quarterly.csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path


def parse_tsf(path: Path) -> list[tuple[str, list[float]]]:
	"""Return (series_name, values) pairs from a .tsf file."""
	attributes: list[str] = []
	series: list[tuple[str, list[float]]] = []
	in_data = False
	with path.open("r", encoding="utf-8", errors="replace") as handle:
		for line_no, raw in enumerate(handle, start=1):
			line = raw.strip()
			if not line or line.startswith("#"):
				continue
			if not in_data:
				lowered = line.lower()
				if lowered.startswith("@attribute"):
					parts = line.split()
					if len(parts) < 3:
						raise ValueError(f"{path}:{line_no}: malformed @attribute line")
					attributes.append(parts[1])
				elif lowered.startswith("@data"):
					if not attributes:
						raise ValueError(f"{path}:{line_no}: @data before any @attribute")
					in_data = True
				continue

			fields = line.split(":")
			if len(fields) != len(attributes) + 1:
				raise ValueError(
					f"{path}:{line_no}: expected {len(attributes) + 1} colon-separated fields, got {len(fields)}"
				)
			name = fields[0]
			values: list[float] = []
			for token in fields[-1].split(","):
				token = token.strip()
				if token == "?":
					raise ValueError(f"{path}:{line_no}: series '{name}' has missing values")
				values.append(float(token))
			if not values:
				raise ValueError(f"{path}:{line_no}: series '{name}' is empty")
			series.append((name, values))
	if not in_data:
		raise ValueError(f"{path}: no @data section found")
	return series


def write_long_csv(series: list[tuple[str, list[float]]], path: Path) -> None:
	longest = max(len(values) for _, values in series)
	width = len(str(longest))
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", encoding="utf-8", newline="\n") as out:
		out.write("unique_id,ds,y\n")
		for name, values in series:
			if "," in name:
				raise ValueError(f"series name '{name}' contains a comma")
			for index, value in enumerate(values, start=1):
				out.write(f"{name},{index:0{width}d},{value!r}\n")


def main(argv: list[str]) -> int:
	parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
	parser.add_argument("input", type=Path, help=".tsf file to convert")
	parser.add_argument("output", type=Path, help="long CSV to write (unique_id,ds,y)")
	parser.add_argument(
		"--min-length",
		type=int,
		default=1,
		help="drop series shorter than this many observations (default: keep all)",
	)
	args = parser.parse_args(argv)

	if not args.input.exists():
		parser.error(f"input file '{args.input}' does not exist")
	series = parse_tsf(args.input)
	kept = [(name, values) for name, values in series if len(values) >= args.min_length]
	dropped = len(series) - len(kept)
	if not kept:
		parser.error("no series left after the --min-length filter")
	write_long_csv(kept, args.output)
	lengths = sorted(len(values) for _, values in kept)
	print(
		f"wrote {len(kept)} series to {args.output} "
		f"(lengths {lengths[0]}..{lengths[-1]}, dropped {dropped} below {args.min_length})"
	)
	return 0


if __name__ == "__main__":
	sys.exit(main(sys.argv[1:]))
