"""Experiment orchestration: configs, trials, CSV emission, statistics.

A config plus its master seed replays bit-exactly: per-trial seeds derive
from (master seed, trial index), permutation seeds from (trial seed, perm
index), and CSV rows carry no wall-clock data (timings live only on the
in-memory records).  Every row ends with a fingerprint of the canonical
config JSON so result files are self-identifying.

Instance files are JSON lines: one object per element with fields id, role
("good" | "noise") and payload (a point list for coverage, a [u, v] pair
for edges), optionally one trailing object {"slots": [[slot, noise_id],
...]} fixing the injection plan.  Plain `u v` edge lists are accepted for
matching streams (all edges good, no plan).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InvalidInstanceError, PreconditionError
from .generators import (
    edges_from_stream,
    generate_matching_instance,
    generate_submod_instance,
    make_plan,
)
from .matching import (
    MatchConfig,
    GuessRunStats,
    exact_max_matching,
    geometric_guess_run,
    greedy_matching,
    match_run,
)
from .recurrence import compute_table, min_diagonal
from .stream_model import Element, InjectionPlan, InstanceSplit, build_stream
from .submodular import CoverageInstance, CoverageOracle, brute_force_opt
from .tree_stream import RunStats, guess_run, run_tree_stream

OUT_DIR_ENV = "INJECTSTREAM_OUT_DIR"

SUBMOD_COLUMNS = (
    "seed", "perm_index", "guess_mode", "best_value", "opt_value",
    "ratio", "nodes_live_max", "oracle_calls", "config_fp",
)
MATCHING_COLUMNS = (
    "seed", "perm_index", "algo", "size", "opt_size", "ratio", "config_fp",
)
RECURRENCE_COLUMNS = ("k", "R(k,k)", "argmin_tag_at_diag", "config_fp")

TAG_NAMES = {0: "none", 1: "first", 2: "second", 3: "third"}


@dataclass
class ExperimentConfig:
    """One experiment: what to run, on what, how often, and where to write.

    instance: {"file": path} or {"kind": name, "params": {...}}.
    adversary: {"strategy": front|back|spread|random, "seed": int} (the seed
    defaults to the trial seed; irrelevant for non-random strategies).
    Submod knobs: k, delta, mode (exact|bucketed), guess (known|auto).
    Matching knobs: match_mode (greedy|match|guessed), mstar (known|auto),
    delta_guess.  Recurrence knobs: t, kmax, table_mode, certify_k, bound.
    """

    problem: str = "submod"
    instance: dict = field(default_factory=lambda: {"kind": "random", "params": {}})
    adversary: dict = field(default_factory=lambda: {"strategy": "random"})
    trials: int = 1
    perms: int = 1
    seed: int = 0
    out: str = "results.csv"
    # submod
    k: int = 3
    delta: float = 0.1
    mode: str = "exact"
    guess: str = "known"
    # matching
    match_mode: str = "greedy"
    mstar: str = "known"
    delta_guess: float = 0.1
    # recurrence
    t: float = 0.8
    kmax: int = 1000
    table_mode: str = "float"
    certify_k: Optional[int] = None
    bound: Optional[str] = None

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:12]


def config_from_dict(raw: dict) -> ExperimentConfig:
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    bad = set(raw) - known
    if bad:
        raise PreconditionError(f"unknown config keys: {sorted(bad)}")
    return ExperimentConfig(**raw)


@dataclass
class TrialRecord:
    """One algorithm run; `columns` mirrors the CSV row for its problem."""

    columns: dict
    wall_time_s: float = 0.0
    memory: dict = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class Summary:
    n: int
    failures: int
    mean: float
    stddev: float
    ci95: tuple[float, float]

    def __str__(self) -> str:
        lo, hi = self.ci95
        return (
            f"n={self.n} failures={self.failures} mean={self.mean:.6f} "
            f"stddev={self.stddev:.6f} ci95=[{lo:.6f}, {hi:.6f}]"
        )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: Optional[Summary]
    csv_path: Optional[str]
    exit_code: int = 0


def trial_seed(master: int, index: int) -> int:
    return master * 1_000_003 + index


def perm_seed(trial: int, index: int) -> int:
    return trial * 1_000_003 + index


def resolve_out(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def summarize(ratios: list[float], failures: int) -> Optional[Summary]:
    if not ratios:
        return None
    n = len(ratios)
    mean = sum(ratios) / n
    if n > 1:
        var = sum((r - mean) ** 2 for r in ratios) / (n - 1)
        sd = math.sqrt(var)
    else:
        sd = 0.0
    half = 1.96 * sd / math.sqrt(n)
    return Summary(
        n=n, failures=failures, mean=mean, stddev=sd, ci95=(mean - half, mean + half)
    )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all trials, write the CSV, and aggregate the ratio column."""
    if config.problem == "submod":
        records = _run_submod(config)
        columns = SUBMOD_COLUMNS
    elif config.problem == "matching":
        records = _run_matching(config)
        columns = MATCHING_COLUMNS
    elif config.problem == "recurrence":
        return _run_recurrence(config)
    else:
        raise PreconditionError(f"unknown problem {config.problem!r}")
    path = resolve_out(config.out)
    if path is not None:
        _write_csv(path, columns, records)
    ratios = [r.columns["ratio"] for r in records if r.error is None]
    failures = sum(1 for r in records if r.error is not None)
    return ExperimentResult(
        config=config,
        records=records,
        summary=summarize(ratios, failures),
        csv_path=path,
        exit_code=1 if failures else 0,
    )


def _write_csv(path: str, columns: tuple, records: list[TrialRecord]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        if rec.error is not None:
            continue
        writer.writerow([rec.columns[c] for c in columns])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


# ---------------------------------------------------------------------------
# submod experiments


def _load_submod_trial(
    config: ExperimentConfig, t_seed: int
) -> tuple[CoverageInstance, InstanceSplit, Optional[InjectionPlan]]:
    src = config.instance
    if "file" in src:
        return read_submod_instance_file(src["file"])
    params = dict(src.get("params", {}))
    params.setdefault("k", config.k)
    instance, split = generate_submod_instance(src["kind"], params, seed=t_seed)
    return instance, split, None


def _run_submod(config: ExperimentConfig) -> list[TrialRecord]:
    fp = config.fingerprint()
    records = []
    for t_idx in range(config.trials):
        t_seed = trial_seed(config.seed, t_idx)
        try:
            instance, split, fixed_plan = _load_submod_trial(config, t_seed)
            oracle = CoverageOracle(instance)
            opt = brute_force_opt(oracle, instance.ground_set(), config.k)
            plan = fixed_plan
            if plan is None:
                plan = make_plan(
                    split,
                    config.adversary.get("strategy", "random"),
                    seed=config.adversary.get("seed", t_seed),
                )
        except Exception as exc:  # noqa: BLE001 - record and move on
            records.append(TrialRecord(columns={}, error=f"{type(exc).__name__}: {exc}"))
            continue
        for p_idx in range(config.perms):
            records.append(
                _one_submod_run(config, t_seed, p_idx, split, plan, instance, opt.value, fp)
            )
    return records


def _one_submod_run(
    config: ExperimentConfig,
    t_seed: int,
    p_idx: int,
    split: InstanceSplit,
    plan: InjectionPlan,
    instance: CoverageInstance,
    opt_value,
    fp: str,
) -> TrialRecord:
    started = time.perf_counter()
    try:
        stream = build_stream(split, plan, perm_seed(t_seed, p_idx))
        oracle = CoverageOracle(instance)
        stats = RunStats()
        if config.guess == "auto":
            sol = guess_run(stream, config.k, config.delta, oracle, stats=stats)
        elif config.mode == "exact":
            sol = run_tree_stream(
                stream, config.k, config.delta, oracle, mode="exact", stats=stats
            )
        else:
            sol = run_tree_stream(
                stream, config.k, config.delta, oracle,
                mode="bucketed", g=opt_value, stats=stats,
            )
        ratio = sol.value / opt_value if opt_value else 0.0
        return TrialRecord(
            columns={
                "seed": t_seed,
                "perm_index": p_idx,
                "guess_mode": stats.guess_mode,
                "best_value": sol.value,
                "opt_value": opt_value,
                "ratio": ratio,
                "nodes_live_max": stats.nodes_live_max,
                "oracle_calls": stats.oracle_calls,
                "config_fp": fp,
            },
            wall_time_s=time.perf_counter() - started,
            memory={
                "nodes_live_max": stats.nodes_live_max,
                "guesses_live_max": stats.guesses_live_max,
            },
        )
    except Exception as exc:  # noqa: BLE001
        return TrialRecord(
            columns={}, wall_time_s=time.perf_counter() - started,
            error=f"{type(exc).__name__}: {exc}",
        )


# ---------------------------------------------------------------------------
# matching experiments


def _load_matching_trial(
    config: ExperimentConfig, t_seed: int
) -> tuple[InstanceSplit, int, Optional[InjectionPlan]]:
    src = config.instance
    if "file" in src:
        split, plan = read_matching_instance_file(src["file"])
        edges = edges_from_stream(list(split.good) + list(split.noise))
        return split, len(exact_max_matching(edges)), plan
    split, m_star = generate_matching_instance(
        src["kind"], src.get("params", {}), seed=t_seed
    )
    return split, m_star, None


def _run_matching(config: ExperimentConfig) -> list[TrialRecord]:
    fp = config.fingerprint()
    algo = config.match_mode
    if config.mstar == "auto" and algo == "match":
        algo = "guessed"
    cfg = MatchConfig(delta_guess=config.delta_guess)
    records = []
    for t_idx in range(config.trials):
        t_seed = trial_seed(config.seed, t_idx)
        try:
            split, m_star, fixed_plan = _load_matching_trial(config, t_seed)
            plan = fixed_plan
            if plan is None:
                plan = make_plan(
                    split,
                    config.adversary.get("strategy", "random"),
                    seed=config.adversary.get("seed", t_seed),
                )
        except Exception as exc:  # noqa: BLE001
            records.append(TrialRecord(columns={}, error=f"{type(exc).__name__}: {exc}"))
            continue
        for p_idx in range(config.perms):
            records.append(
                _one_matching_run(config, cfg, algo, t_seed, p_idx, split, plan, m_star, fp)
            )
    return records


def _one_matching_run(
    config: ExperimentConfig,
    cfg: MatchConfig,
    algo: str,
    t_seed: int,
    p_idx: int,
    split: InstanceSplit,
    plan: InjectionPlan,
    m_star: int,
    fp: str,
) -> TrialRecord:
    started = time.perf_counter()
    try:
        stream = build_stream(split, plan, perm_seed(t_seed, p_idx))
        edges = edges_from_stream(stream)
        memory: dict = {}
        if algo == "greedy":
            out = greedy_matching(edges)
        elif algo == "match":
            out = match_run(edges, m_star, cfg)
        elif algo == "guessed":
            gstats = GuessRunStats()
            out = geometric_guess_run(edges, config.delta_guess, cfg, stats=gstats)
            memory["guesses_live_max"] = gstats.guesses_live_max
        else:
            raise PreconditionError(f"unknown matching mode {algo!r}")
        ratio = len(out) / m_star if m_star else 0.0
        return TrialRecord(
            columns={
                "seed": t_seed,
                "perm_index": p_idx,
                "algo": algo,
                "size": len(out),
                "opt_size": m_star,
                "ratio": ratio,
                "config_fp": fp,
            },
            wall_time_s=time.perf_counter() - started,
            memory=memory,
        )
    except Exception as exc:  # noqa: BLE001
        return TrialRecord(
            columns={}, wall_time_s=time.perf_counter() - started,
            error=f"{type(exc).__name__}: {exc}",
        )


# ---------------------------------------------------------------------------
# recurrence experiments


def _run_recurrence(config: ExperimentConfig) -> ExperimentResult:
    fp = config.fingerprint()
    records: list[TrialRecord] = []
    exit_code = 0
    path = None
    if config.certify_k is not None:
        table = compute_table(t=config.t, k_max=config.certify_k, mode="exact")
        bound = config.bound if config.bound is not None else "0.5506"
        lowest = min_diagonal(table, 1, config.certify_k)
        ok = lowest >= Fraction(str(bound))
        exit_code = 0 if ok else 1
        records.append(
            TrialRecord(
                columns={
                    "certified": ok,
                    "min_diagonal": float(lowest),
                    "bound": str(bound),
                    "config_fp": fp,
                }
            )
        )
    else:
        table = compute_table(t=config.t, k_max=config.kmax, mode=config.table_mode)
        path = resolve_out(config.out)
        if path is not None:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(RECURRENCE_COLUMNS)
            for k in range(1, config.kmax + 1):
                writer.writerow(
                    [k, repr(float(table.diagonal[k])), TAG_NAMES[table.diag_tags[k]], fp]
                )
            with open(path, "w", newline="") as fh:
                fh.write(buf.getvalue())
        records.append(
            TrialRecord(
                columns={
                    "min_diagonal": float(min_diagonal(table, 1, config.kmax)),
                    "kmax": config.kmax,
                    "config_fp": fp,
                }
            )
        )
    return ExperimentResult(
        config=config, records=records, summary=None, csv_path=path, exit_code=exit_code
    )


# ---------------------------------------------------------------------------
# instance files


def _payload_to_json(payload):
    if isinstance(payload, frozenset):
        return sorted(payload, key=repr)
    if isinstance(payload, tuple):
        return list(payload)
    return payload


def write_instance_file(
    path: str, split: InstanceSplit, plan: Optional[InjectionPlan] = None
) -> None:
    """JSON-lines element records plus an optional trailing plan record."""
    with open(path, "w") as fh:
        for role, elements in (("good", split.good), ("noise", split.noise)):
            for el in elements:
                fh.write(
                    json.dumps(
                        {"id": el.id, "role": role, "payload": _payload_to_json(el.payload)},
                        sort_keys=True,
                    )
                    + "\n"
                )
        if plan is not None:
            fh.write(
                json.dumps({"slots": [[s, i] for s, i in plan.entries]}) + "\n"
            )


def _read_records(path: str) -> tuple[list[dict], Optional[InjectionPlan]]:
    elements = []
    plan = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rec = json.loads(line)
            if "slots" in rec:
                plan = InjectionPlan(entries=tuple((s, i) for s, i in rec["slots"]))
            else:
                elements.append(rec)
    return elements, plan


def read_submod_instance_file(
    path: str,
) -> tuple[CoverageInstance, InstanceSplit, Optional[InjectionPlan]]:
    records, plan = _read_records(path)
    if not records:
        raise InvalidInstanceError(f"no element records in {path}")
    good, noise, rects = [], [], {}
    for rec in records:
        points = frozenset(rec["payload"])
        rects[rec["id"]] = points
        el = Element(id=rec["id"], payload=points)
        (good if rec["role"] == "good" else noise).append(el)
    split = InstanceSplit(good=tuple(good), noise=tuple(noise))
    if plan is not None:
        plan.validate(split)
    return CoverageInstance(rect_of=rects), split, plan


def read_matching_instance_file(
    path: str,
) -> tuple[InstanceSplit, Optional[InjectionPlan]]:
    """Role-annotated JSON lines, or a plain `u v` edge list (all good)."""
    with open(path) as fh:
        first = ""
        for line in fh:
            first = line.strip()
            if first:
                break
    if first.startswith("{"):
        records, plan = _read_records(path)
        good, noise = [], []
        for rec in records:
            u, v = rec["payload"]
            u = tuple(u) if isinstance(u, list) else u
            v = tuple(v) if isinstance(v, list) else v
            el = Element(id=rec["id"], payload=(u, v))
            (good if rec["role"] == "good" else noise).append(el)
        split = InstanceSplit(good=tuple(good), noise=tuple(noise))
        if plan is not None:
            plan.validate(split)
        return split, plan
    from .matching import read_edge_stream

    edges = read_edge_stream(path)
    if not edges:
        raise InvalidInstanceError(f"no edges in {path}")
    good = tuple(
        Element(id=i, payload=(e.u, e.v)) for i, e in enumerate(edges)
    )
    return InstanceSplit(good=good, noise=()), None
