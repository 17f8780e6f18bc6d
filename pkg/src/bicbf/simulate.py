"""Simulation study: BIC Bayes factor against the default g-prior oracle.

Each trial generates a balanced two-factor dataset

    y_ijk = alpha_i + tau_j + gamma_ij + eps_ijk

with effects drawn i.i.d. Normal(0, g) and unit-variance noise, computes
log BF10 per effect by both routes, and applies the decision rule "pick H1
iff log BF10 > 0".  Summaries are five-number statistics of the log Bayes
factors plus the per-effect consistency, the proportion of trials on which
the two routes reach the same decision.

Determinism: every draw comes from a substream keyed by (seed, label,
trial), with separate labels for effect draws, noise draws, and the Monte
Carlo oracle.  Consequences relied on elsewhere: trials can run in any
order or in parallel without changing a single bit of output, and two
configs differing only in g share their noise (and, up to the sqrt(g)
scale, their effects), which makes evidence monotone in g testable on
coupled trials.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .anova import EFFECTS, FactorialDataset, bic_bf_for_effect, fit_two_way
from .errors import BicbfError, DomainError, SimulationError
from .gprior import GPriorSpec, default_bf10
from .rng import substream
from .summary import invert

__all__ = [
    "SimulationConfig",
    "SimulationRecord",
    "FiveNumber",
    "EffectSummary",
    "DensitySeries",
    "coupled_config",
    "decide",
    "generate_dataset",
    "run_simulation",
    "summarize",
    "silverman_bandwidth",
    "emit_density_data",
    "write_records",
    "read_records",
    "write_density_data",
    "write_config",
    "read_config",
]

RESULTS_HEADER = (
    "trial",
    "effect",
    "log_bf10_bic",
    "log_bf10_default",
    "decision_bic",
    "decision_default",
)

DENSITY_HEADER = ("effect", "bf_type", "x", "density")

DENSITY_GRID_POINTS = 512


@dataclass(frozen=True)
class SimulationConfig:
    """One simulation condition.

    ``g`` is the effect variance relative to unit noise; ``seed`` keys the
    data-generating substreams, while the oracle carries its own seed.
    """

    cell_n: int
    g: float
    trials: int
    seed: int
    a_levels: int = 2
    b_levels: int = 3
    oracle: GPriorSpec = GPriorSpec()

    def __post_init__(self):
        if self.cell_n < 2:
            raise DomainError(f"cell_n must be at least 2, got {self.cell_n}")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise DomainError(f"g must be finite and nonnegative, got {self.g}")
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials}")
        if self.seed < 0:
            raise DomainError(f"seed must be nonnegative, got {self.seed}")
        if self.a_levels < 2 or self.b_levels < 2:
            raise DomainError(
                f"need at least 2 levels per factor, got {self.a_levels}x{self.b_levels}"
            )


@dataclass(frozen=True)
class SimulationRecord:
    """Both log Bayes factors and decisions for one (trial, effect)."""

    trial: int
    effect: str
    log_bf10_bic: float
    log_bf10_default: float
    decision_bic: str
    decision_default: str

    def __post_init__(self):
        if self.trial < 0:
            raise DomainError(f"trial must be nonnegative, got {self.trial}")
        if self.effect not in EFFECTS:
            raise DomainError(f"effect must be one of {EFFECTS}, got {self.effect!r}")
        for label, log_bf, decision in (
            ("bic", self.log_bf10_bic, self.decision_bic),
            ("default", self.log_bf10_default, self.decision_default),
        ):
            if not math.isfinite(log_bf):
                raise DomainError(f"log_bf10_{label} must be finite, got {log_bf}")
            if decision != decide(log_bf):
                raise DomainError(
                    f"decision_{label}={decision!r} contradicts log_bf10_{label}={log_bf}"
                )


def decide(log_bf10: float) -> str:
    """The decision rule: pick H1 exactly when log BF10 > 0."""
    return "H1" if log_bf10 > 0 else "H0"


def generate_dataset(config: SimulationConfig, trial: int) -> FactorialDataset:
    """The dataset of one trial.

    Effects are scaled standard normals (exactly zero when g = 0) from the
    "effects" substream; noise comes from the separate "noise" substream.
    """
    a, b, cell_n = config.a_levels, config.b_levels, config.cell_n
    effects_rng = substream(config.seed, "effects", trial)
    noise_rng = substream(config.seed, "noise", trial)
    scale = math.sqrt(config.g)
    alpha = scale * effects_rng.standard_normal(a)
    tau = scale * effects_rng.standard_normal(b)
    gamma = scale * effects_rng.standard_normal((a, b))
    eps = noise_rng.standard_normal((a, b, cell_n))
    y = alpha[:, None, None] + tau[None, :, None] + gamma[:, :, None] + eps
    return FactorialDataset(a, b, cell_n, y)


def _trial_records(config: SimulationConfig, trial: int) -> list[SimulationRecord]:
    try:
        data = generate_dataset(config, trial)
        table = fit_two_way(data)
        records = []
        for effect in EFFECTS:
            bic = invert(bic_bf_for_effect(table, effect))
            oracle = default_bf10(data, effect, config.oracle, stream_index=trial)
            records.append(
                SimulationRecord(
                    trial=trial,
                    effect=effect,
                    log_bf10_bic=bic.log_bf,
                    log_bf10_default=oracle.log_bf,
                    decision_bic=decide(bic.log_bf),
                    decision_default=decide(oracle.log_bf),
                )
            )
        return records
    except BicbfError as exc:
        raise SimulationError(f"trial {trial}: {exc}") from exc


def run_simulation(
    config: SimulationConfig,
    n_jobs: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> list[SimulationRecord]:
    """All records of the configured study, in (trial, effect) order.

    ``n_jobs`` > 1 farms trials out to worker processes; substream keying
    makes the output identical for every job count.  ``progress`` is called
    with (finished_trials, total_trials) as trials complete.
    """
    if n_jobs < 1:
        raise DomainError(f"n_jobs must be at least 1, got {n_jobs}")
    per_trial: list[list[SimulationRecord] | None] = [None] * config.trials
    if n_jobs == 1:
        for trial in range(config.trials):
            per_trial[trial] = _trial_records(config, trial)
            if progress is not None:
                progress(trial + 1, config.trials)
    else:
        # submit in bounded waves so huge runs do not queue every trial up front
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            pending = {}
            done_count = 0
            next_trial = 0
            limit = 4 * n_jobs
            while done_count < config.trials:
                while next_trial < config.trials and len(pending) < limit:
                    future = pool.submit(_trial_records, config, next_trial)
                    pending[future] = next_trial
                    next_trial += 1
                finished, _ = wait(pending, return_when=FIRST_COMPLETED)
                for future in finished:
                    per_trial[pending.pop(future)] = future.result()
                    done_count += 1
                    if progress is not None:
                        progress(done_count, config.trials)
    return [record for group in per_trial for record in group]  # type: ignore[union-attr]


@dataclass(frozen=True)
class FiveNumber:
    """Min, quartiles, and max; quartiles by linear interpolation (type 7)."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "FiveNumber":
        if len(values) == 0:
            raise DomainError("no values to summarize")
        points = np.percentile(np.asarray(values, dtype=float), [0, 25, 50, 75, 100])
        return cls(*(float(v) for v in points))

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.minimum, self.q1, self.median, self.q3, self.maximum)


@dataclass(frozen=True)
class EffectSummary:
    """Five-number summaries of both log BF10 routes plus their agreement."""

    effect: str
    n_trials: int
    bic: FiveNumber
    default: FiveNumber
    consistency: float


def summarize(records: Iterable[SimulationRecord]) -> dict[str, EffectSummary]:
    """Per-effect summaries, keyed by effect, for the effects present."""
    records = list(records)
    if not records:
        raise DomainError("no records to summarize")
    out: dict[str, EffectSummary] = {}
    for effect in EFFECTS:
        group = [r for r in records if r.effect == effect]
        if not group:
            continue
        agree = sum(r.decision_bic == r.decision_default for r in group)
        out[effect] = EffectSummary(
            effect=effect,
            n_trials=len(group),
            bic=FiveNumber.of([r.log_bf10_bic for r in group]),
            default=FiveNumber.of([r.log_bf10_default for r in group]),
            consistency=agree / len(group),
        )
    return out


def silverman_bandwidth(values: Sequence[float]) -> float:
    """0.9 * min(sd, IQR/1.349) * n^(-1/5), falling back to sd when IQR is 0."""
    array = np.asarray(values, dtype=float)
    if array.size < 2 or np.all(array == array.flat[0]):
        raise DomainError("need at least two distinct values for a bandwidth")
    sd = float(np.std(array, ddof=1))
    q1, q3 = np.percentile(array, [25, 75])
    iqr = float(q3 - q1)
    spread = min(sd, iqr / 1.349) if iqr > 0 else sd
    return 0.9 * spread * array.size ** (-0.2)


@dataclass(frozen=True, eq=False)
class DensitySeries:
    """Gaussian kernel density of one (effect, BF type) group."""

    effect: str
    bf_type: str
    bandwidth: float
    x: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)


def emit_density_data(
    records: Iterable[SimulationRecord], bandwidth: float | None = None
) -> list[DensitySeries]:
    """Kernel densities of log BF10, one series per (effect, BF type).

    512 evenly spaced grid points spanning [min - 3h, max + 3h] per series,
    h being ``bandwidth`` or Silverman's rule.  A group with no spread has
    no density; the error names it.
    """
    records = list(records)
    if not records:
        raise DomainError("no records for density estimation")
    if bandwidth is not None and not (math.isfinite(bandwidth) and bandwidth > 0):
        raise DomainError(f"bandwidth must be positive, got {bandwidth}")
    series = []
    for effect in EFFECTS:
        group = [r for r in records if r.effect == effect]
        if not group:
            continue
        for bf_type, values in (
            ("bic", [r.log_bf10_bic for r in group]),
            ("default", [r.log_bf10_default for r in group]),
        ):
            array = np.asarray(values)
            if np.all(array == array[0]):
                raise DomainError(
                    f"effect {effect}, {bf_type} log BFs are constant; no density"
                )
            h = bandwidth if bandwidth is not None else silverman_bandwidth(array)
            x = np.linspace(array.min() - 3 * h, array.max() + 3 * h, DENSITY_GRID_POINTS)
            z = (x[:, None] - array[None, :]) / h
            density = np.exp(-0.5 * z * z).sum(axis=1) / (
                array.size * h * math.sqrt(2.0 * math.pi)
            )
            series.append(DensitySeries(effect, bf_type, h, x, density))
    return series


def write_records(records: Iterable[SimulationRecord], path: str | Path) -> None:
    """Write the results file: one row per (trial, effect), 17 significant digits."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULTS_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.trial,
                    r.effect,
                    "%.17g" % r.log_bf10_bic,
                    "%.17g" % r.log_bf10_default,
                    r.decision_bic,
                    r.decision_default,
                ]
            )


def read_records(path: str | Path) -> list[SimulationRecord]:
    """Read a results file back; the first malformed row is named on error."""
    path = Path(path)
    records = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(col.strip() for col in header) != RESULTS_HEADER:
            raise DomainError(
                f"{path}: expected header {','.join(RESULTS_HEADER)}, got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                if len(row) != 6:
                    raise DomainError(f"expected 6 fields, got {len(row)}")
                records.append(
                    SimulationRecord(
                        trial=int(row[0]),
                        effect=row[1],
                        log_bf10_bic=float(row[2]),
                        log_bf10_default=float(row[3]),
                        decision_bic=row[4],
                        decision_default=row[5],
                    )
                )
            except (BicbfError, ValueError) as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from exc
    return records


def write_density_data(series: Iterable[DensitySeries], path: str | Path) -> None:
    """Write density series as delimited rows: effect, bf_type, x, density."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(DENSITY_HEADER)
        for s in series:
            for x, d in zip(s.x, s.density):
                writer.writerow([s.effect, s.bf_type, "%.17g" % x, "%.17g" % d])


_CONFIG_INT_KEYS = ("a_levels", "b_levels", "cell_n", "trials", "seed")
_CONFIG_REQUIRED = ("cell_n", "g", "trials", "seed")
_CONFIG_KEYS = (
    "a_levels",
    "b_levels",
    "cell_n",
    "g",
    "trials",
    "seed",
    "oracle.scale",
    "oracle.mc_samples",
    "oracle.seed",
)


def write_config(config: SimulationConfig, path: str | Path) -> None:
    """Write a config as flat ``key = value`` lines, oracle fields dotted."""
    lines = [
        f"a_levels = {config.a_levels}",
        f"b_levels = {config.b_levels}",
        f"cell_n = {config.cell_n}",
        f"g = {config.g!r}",
        f"trials = {config.trials}",
        f"seed = {config.seed}",
        f"oracle.scale = {config.oracle.scale!r}",
        f"oracle.mc_samples = {config.oracle.mc_samples}",
        f"oracle.seed = {config.oracle.seed}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_config(path: str | Path) -> SimulationConfig:
    """Read a ``key = value`` config file; unknown or repeated keys are errors."""
    path = Path(path)
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise DomainError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in _CONFIG_KEYS:
            raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
        if key in pairs:
            raise DomainError(f"{path}:{lineno}: repeated key {key!r}")
        pairs[key] = value
    missing = [key for key in _CONFIG_REQUIRED if key not in pairs]
    if missing:
        raise DomainError(f"{path}: missing required keys {missing}")

    def parse(key: str, default):
        if key not in pairs:
            return default
        kind = int if key in _CONFIG_INT_KEYS or key.endswith(("mc_samples", "seed")) else float
        try:
            return kind(pairs[key])
        except ValueError as exc:
            raise DomainError(f"{path}: key {key!r}: {exc}") from exc

    base_oracle = GPriorSpec()
    oracle = GPriorSpec(
        scale=parse("oracle.scale", base_oracle.scale),
        mc_samples=parse("oracle.mc_samples", base_oracle.mc_samples),
        seed=parse("oracle.seed", base_oracle.seed),
    )
    return SimulationConfig(
        cell_n=parse("cell_n", None),
        g=parse("g", None),
        trials=parse("trials", None),
        seed=parse("seed", None),
        a_levels=parse("a_levels", 2),
        b_levels=parse("b_levels", 3),
        oracle=oracle,
    )


def coupled_config(config: SimulationConfig, g: float) -> SimulationConfig:
    """The same study at a different g; shares noise and effect shapes."""
    return replace(config, g=g)
