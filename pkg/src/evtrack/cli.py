"""Command-line experiment runner.

Config files are ``key = value`` lines (``#`` comments).  The ``meta.txt``
written next to the results is itself a valid config file, so an experiment
can be replayed with ``evtrack --config out/meta.txt``.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import EvtrackError, ValidationError
from .fusion import Rule
from .propositions import make_frame
from .simulation import (
    ALL_RULES,
    DEFAULT_SEGMENTS,
    GENERATOR_ID,
    MonteCarloSummary,
    build_scenario,
    run_monte_carlo,
    switch_latency,
)
from .tracker import C1_ROWS, C2_ROWS, ConfusionMatrix, Criterion

log = logging.getLogger("evtrack")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3

BUILTIN_CLASSIFIERS = {"c1": C1_ROWS, "c2": C2_ROWS}
DEFAULT_LABELS = ("Fighter", "Cargo")
CONFIG_KEYS = ("labels", "classifier", "matrix", "segments", "scenario", "rules", "runs", "seed",
               "criterion", "out", "threads")


@dataclass(frozen=True)
class ExperimentConfig:
    labels: tuple[str, ...] = DEFAULT_LABELS
    classifier: str = "c1"
    matrix: tuple[tuple[float, ...], ...] = C1_ROWS
    segments: tuple[tuple[str, int], ...] = tuple((DEFAULT_LABELS[t], d) for t, d in DEFAULT_SEGMENTS)
    rules: tuple[Rule, ...] = ALL_RULES
    runs: int = 1000
    seed: int = 0
    criterion: Criterion = Criterion.MAX_BELIEF
    out: str = "results"
    threads: int = 1

    def to_text(self) -> str:
        lines = [
            f"labels = {', '.join(self.labels)}",
            f"classifier = {self.classifier}",
            "matrix = " + "; ".join(" ".join(repr(v) for v in row) for row in self.matrix),
            "segments = " + ", ".join(f"{label}:{d}" for label, d in self.segments),
            f"rules = {', '.join(r.value for r in self.rules)}",
            f"runs = {self.runs}",
            f"seed = {self.seed}",
            f"criterion = {self.criterion.value}",
            f"out = {self.out}",
            f"threads = {self.threads}",
        ]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


# ---------------------------------------------------------------- parsing


def _split_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _parse_int(key: str, text: str, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ValidationError(f"{key}: expected an integer, got {text!r}") from None
    if value < minimum:
        raise ValidationError(f"{key}: must be >= {minimum}, got {value}")
    return value


def _parse_rows(text: str, where: str) -> tuple[tuple[float, ...], ...]:
    rows = []
    for n, chunk in enumerate(text.split(";"), 1):
        try:
            rows.append(tuple(float(v) for v in chunk.split()))
        except ValueError:
            raise ValidationError(f"{where}: row {n}: non-numeric entry in {chunk.strip()!r}") from None
    return tuple(rows)


def read_classifier_file(path: str) -> tuple[tuple[str, ...], tuple[tuple[float, ...], ...]]:
    """First line: labels; then one whitespace-separated row per line."""
    try:
        raw = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"classifier file {path}: {exc.strerror}") from None
    lines = [(n, ln.split("#", 1)[0].strip()) for n, ln in enumerate(raw, 1)]
    lines = [(n, ln) for n, ln in lines if ln]
    if not lines:
        raise ValidationError(f"classifier file {path} is empty")
    labels = tuple(lines[0][1].replace(",", " ").split())
    rows = []
    for n, ln in lines[1:]:
        try:
            rows.append(tuple(float(v) for v in ln.split()))
        except ValueError:
            raise ValidationError(f"{path}:{n}: non-numeric entry in {ln!r}") from None
    return labels, tuple(rows)


def read_scenario_file(path: str) -> tuple[tuple[str, int], ...]:
    """One ``<label> <duration>`` segment per line."""
    try:
        raw = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"scenario file {path}: {exc.strerror}") from None
    segs = []
    for n, ln in enumerate(raw, 1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = ln.replace(":", " ").split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{n}: expected '<label> <duration>'")
        segs.append((parts[0], _parse_int(f"{path}:{n}", parts[1], 1)))
    return tuple(segs)


def _parse_segments(text: str) -> tuple[tuple[str, int], ...]:
    segs = []
    for item in _split_list(text):
        label, sep, dur = item.rpartition(":")
        if not sep:
            raise ValidationError(f"segments: expected 'label:duration', got {item!r}")
        segs.append((label.strip(), _parse_int("segments", dur.strip(), 1)))
    return tuple(segs)


def read_config_file(path: str) -> dict[str, str]:
    try:
        raw = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"config file {path}: {exc.strerror}") from None
    values: dict[str, str] = {}
    for n, line in enumerate(raw, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ValidationError(f"{path}:{n}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ValidationError(f"{path}:{n}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def resolve_config(values: dict[str, str]) -> ExperimentConfig:
    """Build a validated config from raw string values; absent keys take defaults."""
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown key(s): {', '.join(sorted(unknown))}")

    classifier = values.get("classifier", "c1")
    labels = tuple(_split_list(values["labels"])) if "labels" in values else None
    if "matrix" in values:
        matrix = _parse_rows(values["matrix"], "matrix")
    elif classifier.lower() in BUILTIN_CLASSIFIERS:
        classifier = classifier.lower()
        matrix = BUILTIN_CLASSIFIERS[classifier]
    else:
        file_labels, matrix = read_classifier_file(classifier)
        if labels is not None and labels != file_labels:
            raise ValidationError(f"classifier: labels {file_labels} differ from configured {labels}")
        labels = file_labels
    labels = labels or DEFAULT_LABELS
    frame = make_frame(labels)
    try:
        ConfusionMatrix(frame, matrix)
    except ValidationError as exc:
        raise ValidationError(f"classifier {classifier}: {exc}") from None

    if "segments" in values:
        segments = _parse_segments(values["segments"])
    elif "scenario" in values:
        segments = read_scenario_file(values["scenario"])
    elif frame.size == 2:
        segments = tuple((labels[t], d) for t, d in DEFAULT_SEGMENTS)
    else:
        raise ValidationError("scenario: no default scenario for a frame with more than two types")
    try:
        build_scenario(frame, segments)
    except ValidationError as exc:
        raise ValidationError(f"scenario: {exc}") from None

    rule_text = values.get("rules", "both").lower()
    try:
        rules = ALL_RULES if rule_text == "both" else tuple(
            r for r in ALL_RULES if r in {Rule(x) for x in _split_list(rule_text)}
        )
    except ValueError:
        raise ValidationError(f"rules: unknown rule in {rule_text!r}") from None
    if not rules:
        raise ValidationError("rules: at least one rule is required")
    try:
        criterion = Criterion(values.get("criterion", "belief").lower())
    except ValueError:
        raise ValidationError(f"criterion: expected belief or pignistic, got {values['criterion']!r}") from None

    return ExperimentConfig(
        labels=tuple(labels),
        classifier=classifier,
        matrix=tuple(tuple(float(v) for v in row) for row in matrix),
        segments=tuple(segments),
        rules=rules,
        runs=_parse_int("runs", values.get("runs", "1000"), 1),
        seed=_parse_int("seed", values.get("seed", "0"), 0),
        criterion=criterion,
        out=values.get("out", "results"),
        threads=_parse_int("threads", values.get("threads", "1"), 1),
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="evtrack",
        description="Monte-Carlo target type tracking with Dempster's rule and PCR5.",
    )
    p.add_argument("--config", metavar="PATH", help="key = value config file (flags override it)")
    p.add_argument("--classifier", metavar="{c1,c2,PATH}", help="builtin confusion matrix or matrix file")
    p.add_argument("--scenario", metavar="PATH", help="segment file: '<label> <duration>' per line")
    p.add_argument("--runs", metavar="N")
    p.add_argument("--seed", metavar="N")
    p.add_argument("--rule", choices=["dempster", "pcr5", "both"])
    p.add_argument("--criterion", choices=["belief", "pignistic"])
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--threads", metavar="N", help="worker processes for the Monte-Carlo runs")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv: Sequence[str] | None = None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    return _config_from_args(args)


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    if args.classifier is not None:
        values["classifier"] = args.classifier
        values.pop("matrix", None)
    if args.scenario is not None:
        values["scenario"] = args.scenario
        values.pop("segments", None)
    for flag, key in (("runs", "runs"), ("seed", "seed"), ("rule", "rules"), ("criterion", "criterion"),
                      ("out", "out"), ("threads", "threads")):
        if getattr(args, flag) is not None:
            values[key] = getattr(args, flag)
    return resolve_config(values)


# ---------------------------------------------------------------- output


def _fmt(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.12g}"


def summary_rows(config: ExperimentConfig, summary: MonteCarloSummary) -> tuple[list[str], list[list[str]]]:
    header = ["scan", "truth"]
    for rule in ALL_RULES:
        header += [f"{rule}_m_{label}" for label in config.labels]
        header += [f"{rule}_m_Theta", f"{rule}_correct_rate"]
    rows = []
    truth = summary.scenario.truth()
    width = len(config.labels) + 2
    for k in range(summary.scenario.k_max):
        row = [str(k + 1), config.labels[truth[k]]]
        for rule in ALL_RULES:
            rs = summary.rules.get(rule)
            if rs is None or not rs.usable:
                row += [""] * width
            else:
                row += [_fmt(float(v)) for v in rs.mean_masses[k]] + [_fmt(float(rs.accuracy[k]))]
        rows.append(row)
    return header, rows


def latency_rows(config: ExperimentConfig, summary: MonteCarloSummary) -> tuple[list[str], list[list[str]]]:
    header = ["switch", "scan", "from", "to", "segment_length"]
    for rule in ALL_RULES:
        header += [f"{rule}_runs", f"{rule}_mean", f"{rule}_median", f"{rule}_censor_rate"]
    stats = switch_latency(summary, summary.scenario)
    rows = []
    for n, sw in enumerate(summary.scenario.switches()):
        row = [str(n + 1), str(sw.scan), config.labels[sw.old], config.labels[sw.new], str(sw.length)]
        for rule in ALL_RULES:
            if rule not in stats or not summary.rules[rule].usable:
                row += ["", "", "", ""]
            else:
                s = stats[rule][n]
                row += [str(s.n), _fmt(s.mean), _fmt(s.median), _fmt(s.censor_rate)]
        rows.append(row)
    return header, rows


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def plot_script(config: ExperimentConfig, header: list[str]) -> str:
    """gnuplot script drawing one belief-vs-scan panel per type."""
    lines = [
        "# gnuplot script; run from this directory: gnuplot plot.gp",
        "set datafile separator ','",
        "set terminal pngcairo size 900,500",
        "set xlabel 'Scan'",
        "set ylabel 'Belief'",
        "set yrange [0:1.05]",
        "set key outside",
    ]
    styles = {Rule.DEMPSTER: "lc rgb 'red' pt 2", Rule.PCR5: "lc rgb 'blue' pt 6"}
    titles = {Rule.DEMPSTER: "Dempster", Rule.PCR5: "PCR5"}
    for label in config.labels:
        lines.append(f"set output 'belief_{label}.png'")
        lines.append(f"set title 'Belief mass for {label} type (classifier {config.classifier})'")
        parts = []
        for rule in config.rules:
            col = header.index(f"{rule}_m_{label}") + 1
            parts.append(f"'summary.csv' every ::1 using 1:{col} with linespoints {styles[rule]} title '{titles[rule]}'")
        lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def meta_text(config: ExperimentConfig, summary: MonteCarloSummary) -> str:
    lines = [
        f"# evtrack {__version__}",
        f"# generator = {GENERATOR_ID}",
        f"# config_sha256 = {config.digest()}",
    ]
    for rule, rs in summary.rules.items():
        lines.append(f"# {rule}: ok_runs = {rs.n_ok}, failed_runs = {rs.n_failed}")
    return "\n".join(lines) + "\n" + config.to_text()


def run_experiment(config: ExperimentConfig) -> int:
    frame = make_frame(config.labels)
    cm = ConfusionMatrix(frame, config.matrix)
    scenario = build_scenario(frame, config.segments)
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        log.error("cannot create output directory %s: %s", out, exc.strerror)
        return EXIT_IO

    log.info("running %d runs (%s) seed=%d", config.runs, ", ".join(map(str, config.rules)), config.seed)
    summary = run_monte_carlo(scenario, cm, config.rules, config.runs, config.seed, config.criterion, config.threads)

    s_header, s_rows = summary_rows(config, summary)
    l_header, l_rows = latency_rows(config, summary)
    try:
        _write_csv(out / "summary.csv", s_header, s_rows)
        _write_csv(out / "latency.csv", l_header, l_rows)
        (out / "meta.txt").write_text(meta_text(config, summary))
        (out / "plot.gp").write_text(plot_script(config, s_header))
    except OSError as exc:
        log.error("cannot write results to %s: %s", out, exc.strerror)
        return EXIT_IO

    unusable = [str(r) for r, rs in summary.rules.items() if not rs.usable]
    if unusable:
        log.error("rule(s) failed in every run: %s", ", ".join(unusable))
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        config = _config_from_args(args)
    except ValidationError as exc:
        print(f"evtrack: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return run_experiment(config)
    except ValidationError as exc:
        print(f"evtrack: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EvtrackError as exc:
        print(f"evtrack: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
