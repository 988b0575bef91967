"""Monte-Carlo harness for comparing fusion rules on a type-switching target.

Run ``i`` of an experiment with master seed ``s`` draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))``; all rules in a run consume the
same declaration sequence.  Aggregation is done in run-index order, so the
summary does not depend on how runs are scheduled.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import TotalConflictError, ValidationError
from .fusion import Rule
from .propositions import Frame, make_frame
from .tracker import ConfusionMatrix, Criterion, Declaration, init_tracker, step

log = logging.getLogger(__name__)

DEFAULT_FRAME = make_frame(["Fighter", "Cargo"])
FIGHTER, CARGO = 0, 1
# Cargo first, then Fighter excursions of 20, 10 and 5 scans; 120 scans total.
DEFAULT_SEGMENTS = ((CARGO, 20), (FIGHTER, 20), (CARGO, 30), (FIGHTER, 10), (CARGO, 25), (FIGHTER, 5), (CARGO, 10))
ALL_RULES = (Rule.DEMPSTER, Rule.PCR5)
GENERATOR_ID = f"numpy.random.PCG64/SeedSequence(master_seed,spawn_key=(run_index,)) numpy-{np.__version__}"


@dataclass(frozen=True)
class Switch:
    scan: int  # first scan (1-based) carrying the new type
    old: int
    new: int
    length: int  # scans in the new segment


@dataclass(frozen=True)
class Scenario:
    frame: Frame
    segments: tuple[tuple[int, int], ...]

    def __post_init__(self):
        segs = tuple((int(t), int(d)) for t, d in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValidationError("scenario needs at least one segment")
        for n, (t, d) in enumerate(segs):
            if not 0 <= t < self.frame.size:
                raise ValidationError(f"segment {n + 1}: type index {t} outside frame")
            if d < 1:
                raise ValidationError(f"segment {n + 1}: duration must be >= 1, got {d}")
            if n and segs[n - 1][0] == t:
                raise ValidationError(f"segment {n + 1} repeats the type of the previous segment")

    @property
    def k_max(self) -> int:
        return sum(d for _, d in self.segments)

    def truth(self) -> np.ndarray:
        return np.repeat([t for t, _ in self.segments], [d for _, d in self.segments]).astype(np.int64)

    def switches(self) -> list[Switch]:
        out, scan = [], 1
        for (prev, d_prev), (t, d) in zip(self.segments, self.segments[1:]):
            scan += d_prev
            out.append(Switch(scan, prev, t, d))
        return out


def build_scenario(frame: Frame, segments: Iterable[tuple[int | str, int]], k_max: int | None = None) -> Scenario:
    segs = tuple((frame.index(t) if isinstance(t, str) else t, d) for t, d in segments)
    scenario = Scenario(frame, segs)
    if k_max is not None and scenario.k_max != k_max:
        raise ValidationError(f"segments cover {scenario.k_max} scans, expected {k_max}")
    return scenario


def default_scenario(frame: Frame = DEFAULT_FRAME) -> Scenario:
    if frame.size != 2:
        raise ValidationError("the default scenario needs a two-type frame")
    return Scenario(frame, DEFAULT_SEGMENTS)


def sample_declaration(true_type: int, cm: ConfusionMatrix, rng: np.random.Generator, k: int = 1) -> Declaration:
    """Categorical draw from row ``true_type`` of the confusion matrix."""
    u = rng.random()
    acc = 0.0
    row = cm.rows[true_type]
    for j, p in enumerate(row):
        acc += p
        if u < acc:
            return Declaration(k, j)
    # u landed in rounding slack above the row sum
    return Declaration(k, max(j for j, p in enumerate(row) if p > 0))


def run_seed(master_seed: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(run_index,))


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class RuleTrace:
    """Per-scan output of one rule: masses are (singletons..., total ignorance)."""

    rule: Rule
    masses: np.ndarray
    decisions: np.ndarray
    failed_at: int | None = None

    @property
    def failed(self) -> bool:
        return self.failed_at is not None


@dataclass
class RunResult:
    truth: np.ndarray
    declared: np.ndarray
    traces: dict[Rule, RuleTrace]

    def correct(self, rule: Rule) -> np.ndarray:
        return self.traces[rule].decisions == self.truth


def _normalize_rules(rules: Iterable[Rule | str]) -> tuple[Rule, ...]:
    wanted = {Rule(r) for r in rules}
    if not wanted:
        raise ValidationError("at least one rule is required")
    return tuple(r for r in ALL_RULES if r in wanted)


def run_single(
    scenario: Scenario,
    cm: ConfusionMatrix,
    rules: Iterable[Rule | str] = ALL_RULES,
    seed=0,
    criterion: Criterion | str = Criterion.MAX_BELIEF,
) -> RunResult:
    rules = _normalize_rules(rules)
    if cm.frame != scenario.frame:
        raise ValidationError("confusion matrix and scenario use different frames")
    rng = make_rng(seed)
    truth = scenario.truth()
    declarations = [sample_declaration(int(t), cm, rng, k) for k, t in enumerate(truth, 1)]
    declared = np.array([d.index for d in declarations], dtype=np.int64)

    width = scenario.frame.size + 1
    full = scenario.frame.full_mask
    traces = {}
    for rule in rules:
        masses = np.full((len(truth), width), np.nan)
        decisions = np.full(len(truth), -1, dtype=np.int64)
        state = init_tracker(scenario.frame, rule, criterion)
        failed_at = None
        for decl in declarations:
            try:
                state, decision, posterior = step(state, decl, cm)
            except TotalConflictError as exc:
                failed_at = exc.step
                log.debug("%s failed at scan %s", rule, exc.step)
                break
            row = masses[decl.k - 1]
            row[:-1] = posterior.singleton_beliefs()
            row[-1] = posterior[full]
            decisions[decl.k - 1] = decision
        traces[rule] = RuleTrace(rule, masses, decisions, failed_at)
    return RunResult(truth, declared, traces)


def run_latencies(decisions: np.ndarray, scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Per-switch latency in scans and a censoring flag.

    Latency is the smallest d >= 0 such that the decision at the switch scan
    plus d equals the new type; if none exists inside the segment the value
    is the segment length and the switch is censored.
    """
    switches = scenario.switches()
    lat = np.empty(len(switches), dtype=np.int64)
    cens = np.zeros(len(switches), dtype=bool)
    for n, sw in enumerate(switches):
        window = decisions[sw.scan - 1 : sw.scan - 1 + sw.length]
        hits = np.flatnonzero(window == sw.new)
        if hits.size:
            lat[n] = hits[0]
        else:
            lat[n] = sw.length
            cens[n] = True
    return lat, cens


@dataclass(frozen=True)
class LatencyStats:
    switch: Switch
    rule: Rule
    n: int
    mean: float  # over uncensored runs; nan if all censored
    median: float
    censor_rate: float


def _latency_stats(sw: Switch, rule: Rule, lat: np.ndarray, cens: np.ndarray) -> LatencyStats:
    n = len(lat)
    hit = lat[~cens]
    mean = float(np.mean(hit)) if hit.size else float("nan")
    median = float(np.median(hit)) if hit.size else float("nan")
    rate = float(np.mean(cens)) if n else float("nan")
    return LatencyStats(sw, rule, n, mean, median, rate)


@dataclass
class RuleSummary:
    rule: Rule
    n_ok: int
    n_failed: int
    failure_scans: list[int]
    mean_masses: np.ndarray | None  # (k_max, M + 1), nan if unusable
    accuracy: np.ndarray | None  # per-scan correct-decision rate
    latencies: np.ndarray  # (n_ok, n_switches)
    censored: np.ndarray

    @property
    def usable(self) -> bool:
        return self.n_ok > 0


@dataclass
class MonteCarloSummary:
    scenario: Scenario
    n_runs: int
    master_seed: int
    criterion: Criterion
    rules: dict[Rule, RuleSummary] = field(default_factory=dict)
    generator: str = GENERATOR_ID

    def mean_belief(self, rule: Rule | str, type_index: int) -> np.ndarray:
        return self.rules[Rule(rule)].mean_masses[:, type_index]

    def segment_rate(self, rule: Rule | str, segment: int) -> float:
        """Correct-decision rate averaged over the scans of one segment."""
        start = sum(d for _, d in self.scenario.segments[:segment])
        length = self.scenario.segments[segment][1]
        return float(np.mean(self.rules[Rule(rule)].accuracy[start : start + length]))

    def segment_mean_belief(self, rule: Rule | str, segment: int) -> float:
        start = sum(d for _, d in self.scenario.segments[:segment])
        t, length = self.scenario.segments[segment]
        return float(np.mean(self.mean_belief(rule, t)[start : start + length]))


def _reduced_run(args):
    scenario, cm, rules, master_seed, index, criterion = args
    res = run_single(scenario, cm, rules, run_seed(master_seed, index), criterion)
    out = {}
    for rule, tr in res.traces.items():
        if tr.failed:
            out[rule] = (tr.failed_at,)
        else:
            lat, cens = run_latencies(tr.decisions, scenario)
            out[rule] = (None, tr.masses, tr.decisions == res.truth, lat, cens)
    return out


def run_monte_carlo(
    scenario: Scenario,
    cm: ConfusionMatrix,
    rules: Iterable[Rule | str] = ALL_RULES,
    n_runs: int = 1000,
    master_seed: int = 0,
    criterion: Criterion | str = Criterion.MAX_BELIEF,
    workers: int = 1,
) -> MonteCarloSummary:
    if n_runs < 1:
        raise ValidationError("n_runs must be >= 1")
    rules = _normalize_rules(rules)
    criterion = Criterion(criterion)
    jobs = [(scenario, cm, rules, master_seed, i, criterion) for i in range(n_runs)]
    if workers > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reduced = list(pool.map(_reduced_run, jobs, chunksize=max(1, n_runs // (4 * workers))))
    else:
        reduced = [_reduced_run(job) for job in jobs]

    summary = MonteCarloSummary(scenario, n_runs, master_seed, criterion)
    k_max, width = scenario.k_max, scenario.frame.size + 1
    n_sw = len(scenario.switches())
    for rule in rules:
        ok = [r[rule] for r in reduced if r[rule][0] is None]
        failures = [r[rule][0] for r in reduced if r[rule][0] is not None]
        if ok:
            mean_masses = np.mean(np.stack([o[1] for o in ok]), axis=0)
            accuracy = np.mean(np.stack([o[2] for o in ok]), axis=0)
            lat = np.stack([o[3] for o in ok])
            cens = np.stack([o[4] for o in ok])
        else:
            log.warning("rule %s failed in every run", rule)
            mean_masses = np.full((k_max, width), np.nan)
            accuracy = np.full(k_max, np.nan)
            lat = np.zeros((0, n_sw), dtype=np.int64)
            cens = np.zeros((0, n_sw), dtype=bool)
        summary.rules[rule] = RuleSummary(rule, len(ok), len(failures), failures, mean_masses, accuracy, lat, cens)
    return summary


def switch_latency(result: RunResult | MonteCarloSummary, scenario: Scenario) -> dict[Rule, list[LatencyStats]]:
    """Latency statistics per rule and per switch."""
    switches = scenario.switches()
    out: dict[Rule, list[LatencyStats]] = {}
    if isinstance(result, RunResult):
        for rule, tr in result.traces.items():
            if tr.failed:
                lat = np.zeros((0, len(switches)), dtype=np.int64)
                cens = np.zeros((0, len(switches)), dtype=bool)
            else:
                one_lat, one_cens = run_latencies(tr.decisions, scenario)
                lat, cens = one_lat[None, :], one_cens[None, :]
            out[rule] = [_latency_stats(sw, rule, lat[:, n], cens[:, n]) for n, sw in enumerate(switches)]
        return out
    for rule, rs in result.rules.items():
        out[rule] = [_latency_stats(sw, rule, rs.latencies[:, n], rs.censored[:, n]) for n, sw in enumerate(switches)]
    return out


def declarations_for(scenario: Scenario, cm: ConfusionMatrix, seed) -> list[int]:
    """Declaration sequence a run with ``seed`` would see."""
    rng = make_rng(seed)
    return [sample_declaration(int(t), cm, rng, k).index for k, t in enumerate(scenario.truth(), 1)]

