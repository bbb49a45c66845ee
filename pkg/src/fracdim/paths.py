"""Sample-path generation: Brownian motion on arbitrary time grids plus
cadlag drifts.

Two generators are provided: plain Gaussian increments on any grid, and
midpoint-displacement refinement on dyadic grids (level-k refinement adds an
independent Gaussian of variance 2^-(k+1) at each new midpoint).  Drifts are
declarative ``DriftSpec`` values evaluated pointwise; step-like drifts take
their right-limit value at every jump, which makes evaluation a single
well-defined right-continuous function.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .rng import stream

MAX_GRID_POINTS = 1 << 24

# staircase frequencies above this lose integer resolution in float64 grids
MAX_STAIRCASE_N = 1 << 24


# ---------------------------------------------------------------------------
# time grids


@dataclass(frozen=True)
class GridDescriptor:
    """Tag describing which ideal subset of [0,1] a grid discretizes."""

    kind: str  # uniform | power_set | dyadic | custom
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class TimeGrid:
    """Finite, strictly increasing sample times inside [0, 1]."""

    times: np.ndarray
    descriptor: GridDescriptor

    def __post_init__(self):
        t = np.ascontiguousarray(self.times, dtype=np.float64)
        if t.size == 0:
            raise DomainError("empty-grid", "a time grid needs at least one point")
        if t.ndim != 1:
            raise DomainError("empty-grid", "times must be one-dimensional")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("grid times must be strictly increasing")
        if t[0] < 0.0 or t[-1] > 1.0:
            raise ValueError("grid times must lie in [0, 1]")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return int(self.times.size)

    @staticmethod
    def uniform(n_points: int) -> "TimeGrid":
        if n_points < 1:
            raise DomainError("empty-grid", "n_points must be >= 1")
        if n_points > MAX_GRID_POINTS:
            raise DomainError("grid-too-large", f"{n_points} points exceed cap {MAX_GRID_POINTS}")
        times = np.array([0.0]) if n_points == 1 else np.linspace(0.0, 1.0, n_points)
        return TimeGrid(times, GridDescriptor("uniform", {"n_points": n_points}))

    @staticmethod
    def dyadic(level: int) -> "TimeGrid":
        if level < 0:
            raise ValueError("level must be >= 0")
        n = (1 << level) + 1
        if n > MAX_GRID_POINTS:
            raise DomainError("grid-too-large", f"2^{level}+1 points exceed cap {MAX_GRID_POINTS}")
        return TimeGrid(np.linspace(0.0, 1.0, n), GridDescriptor("dyadic", {"level": level}))

    @staticmethod
    def custom(times) -> "TimeGrid":
        return TimeGrid(np.asarray(times, dtype=np.float64), GridDescriptor("custom"))


# ---------------------------------------------------------------------------
# drifts


@dataclass(frozen=True)
class DriftSpec:
    """Declarative description of a cadlag drift f: [0,1] -> R^d.

    Variants: ``zero``, ``linear`` (slope mu), ``psi_n`` (one staircase
    oscillation of frequency n), ``lacunary_sum`` (truncated sum of
    staircases over a frequency schedule), ``table`` (right-continuous step
    function through given knots).
    """

    variant: str
    dim: int = 1
    mu: np.ndarray | None = None
    n: int | None = None
    schedule: tuple[int, ...] | None = None
    truncation: int | None = None
    table_times: np.ndarray | None = None
    table_values: np.ndarray | None = None

    @staticmethod
    def zero(d: int = 1) -> "DriftSpec":
        return DriftSpec("zero", dim=d)

    @staticmethod
    def linear(mu) -> "DriftSpec":
        mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
        return DriftSpec("linear", dim=mu.size, mu=mu)

    @staticmethod
    def psi_n(n: int) -> "DriftSpec":
        n = int(n)
        if n < 1 or n > MAX_STAIRCASE_N:
            raise ValueError(f"staircase frequency must be in [1, {MAX_STAIRCASE_N}]")
        return DriftSpec("psi_n", dim=1, n=n)

    @staticmethod
    def lacunary(schedule, truncation: int | None = None) -> "DriftSpec":
        sched = tuple(int(n) for n in schedule)
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValueError("frequency schedule must be strictly increasing")
        if any(n < 1 for n in sched):
            raise ValueError("frequencies must be positive integers")
        k = len(sched) if truncation is None else int(truncation)
        if not 0 <= k <= len(sched):
            raise ValueError("truncation outside schedule length")
        if any(n > MAX_STAIRCASE_N for n in sched[:k]):
            raise DomainError(
                "schedule-not-simulable",
                f"frequencies above {MAX_STAIRCASE_N} cannot be evaluated on float grids",
            )
        return DriftSpec("lacunary_sum", dim=1, schedule=sched, truncation=k)

    @staticmethod
    def table(times, values) -> "DriftSpec":
        t = np.asarray(times, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if t.ndim != 1 or t.size != v.shape[0] or t.size == 0:
            raise ValueError("table needs matching non-empty times and values")
        if not np.all(np.diff(t) > 0):
            raise ValueError("table times must be strictly increasing")
        if t[0] != 0.0:
            raise ValueError("table must start at t=0 to cover [0, 1]")
        return DriftSpec("table", dim=v.shape[1], table_times=t, table_values=v)

    @property
    def is_zero(self) -> bool:
        return self.variant == "zero"

    @property
    def is_continuous(self) -> bool:
        """True when the drift has no jumps (zero, linear, or constant table)."""
        if self.variant in ("zero", "linear"):
            return True
        if self.variant == "table":
            return bool(np.all(self.table_values == self.table_values[0]))
        return False

    def spec_string(self) -> str:
        """Round-trippable CLI form of this drift."""
        if self.variant == "zero":
            return "zero"
        if self.variant == "linear":
            return "linear:" + ",".join(repr(float(x)) for x in self.mu)
        if self.variant == "psi_n":
            return f"psi_n:{self.n}"
        if self.variant == "lacunary_sum":
            return "lacunary:custom(%s):%d" % (",".join(map(str, self.schedule)), self.truncation)
        return "table:<inline>"


def _staircase(n: int, x: np.ndarray) -> np.ndarray:
    """Sawtooth staircase n^(-3/4) * floor(sqrt(n) * tent(n x)) with the
    right-limit value at every jump.

    ``tent`` has period 1 and equals max(x, 1-x) on [0, 1].  Where the
    pre-floor ramp sits exactly on an integer and is decreasing to the right,
    the floor is lowered by one so the returned value is the right limit.
    The exact-integer test is floating-point equality; it is exact whenever
    n is a perfect square and x is dyadic, which covers every preset used
    here.
    """
    y = n * x
    fr = y - np.floor(y)
    phi = np.maximum(fr, 1.0 - fr)
    u = np.sqrt(float(n)) * phi
    v = np.floor(u)
    descending = fr < 0.5
    v = np.where(descending & (u == v), v - 1.0, v)
    return float(n) ** -0.75 * v


def eval_drift(spec: DriftSpec, t) -> np.ndarray:
    """Evaluate a drift at time(s) t in [0, 1].

    Scalar t gives shape (d,); an array of shape (k,) gives (k, d).  Step
    variants return the right-limit value at jumps.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    scalar = np.ndim(t) == 0
    if t_arr.size and (t_arr.min() < 0.0 or t_arr.max() > 1.0):
        raise DomainError("time-out-of-range", "drift defined on [0, 1] only")

    if spec.variant == "zero":
        out = np.zeros((t_arr.size, spec.dim))
    elif spec.variant == "linear":
        out = t_arr[:, None] * spec.mu[None, :]
    elif spec.variant == "psi_n":
        out = _staircase(spec.n, t_arr)[:, None]
    elif spec.variant == "lacunary_sum":
        acc = np.zeros(t_arr.size)
        for n_k in spec.schedule[: spec.truncation]:
            acc += _staircase(n_k, t_arr)
        out = acc[:, None]
    elif spec.variant == "table":
        idx = np.searchsorted(spec.table_times, t_arr, side="right") - 1
        out = spec.table_values[idx]
    else:  # pragma: no cover
        raise ValueError(f"unknown drift variant {spec.variant!r}")
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# sample paths


@dataclass(frozen=True)
class SamplePath:
    """Times plus R^d values of the noise, the drift, and their sum."""

    grid: TimeGrid
    dim: int
    bm_values: np.ndarray      # (len(grid), dim)
    drift_values: np.ndarray   # (len(grid), dim)
    seed: int
    method: str                # increments | levy | file

    def __post_init__(self):
        n = len(self.grid)
        for name in ("bm_values", "drift_values"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (n, self.dim):
                raise ValueError(f"{name} must have shape ({n}, {self.dim})")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def combined(self) -> np.ndarray:
        return self.bm_values + self.drift_values


def generate_bm(grid: TimeGrid, d: int, seed: int) -> SamplePath:
    """Brownian path on the grid from independent Gaussian increments.

    Per coordinate, increments over consecutive grid times have variance
    equal to the time difference; the first value is drawn with variance
    equal to the first grid time (exactly zero when the grid starts at 0).
    Deterministic given (grid, d, seed).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    t = grid.times
    dt = np.diff(t, prepend=0.0)
    z = stream(seed, 0).standard_normal((t.size, d))
    values = np.cumsum(np.sqrt(dt)[:, None] * z, axis=0)
    return SamplePath(grid, d, values, np.zeros_like(values), int(seed), "increments")


def levy_construct(depth: int, d: int, seed: int, max_points: int = MAX_GRID_POINTS) -> SamplePath:
    """Brownian path on the dyadic grid of 2^depth intervals by midpoint
    displacement.

    Level k draws from its own random stream, so refining the same seed to a
    larger depth leaves all coarser dyadic values unchanged.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    n_intervals = 1 << depth
    if n_intervals + 1 > max_points:
        raise DomainError("grid-too-large", f"2^{depth}+1 points exceed cap {max_points}")
    values = np.zeros((n_intervals + 1, d))
    values[-1] = stream(seed, 0).standard_normal(d)
    for k in range(1, depth + 1):
        step = n_intervals >> k
        mids = np.arange(step, n_intervals, 2 * step)
        z = stream(seed, k).standard_normal((mids.size, d))
        values[mids] = 0.5 * (values[mids - step] + values[mids + step]) + np.sqrt(2.0 ** -(k + 1)) * z
    grid = TimeGrid.dyadic(depth)
    return SamplePath(grid, d, values, np.zeros_like(values), int(seed), "levy")


def apply_drift(path: SamplePath, spec: DriftSpec) -> SamplePath:
    """Fill a path's drift values by evaluating the drift on its grid."""
    if spec.variant != "zero" and spec.dim != path.dim:
        raise DomainError("dim-mismatch", f"drift dim {spec.dim} vs path dim {path.dim}")
    drift = eval_drift(spec, path.grid.times)
    if spec.variant == "zero":
        drift = np.zeros((len(path.grid), path.dim))
    return replace(path, drift_values=drift)


# ---------------------------------------------------------------------------
# CSV serialization: header t,b_1..b_d,f_1..f_d, 17 significant digits


def write_path_csv(path: SamplePath, fh) -> None:
    d = path.dim
    header = "t," + ",".join(f"b_{i}" for i in range(1, d + 1))
    header += "," + ",".join(f"f_{i}" for i in range(1, d + 1))
    fh.write(header + "\n")
    for t, b, f in zip(path.grid.times, path.bm_values, path.drift_values):
        row = [f"{t:.17g}"] + [f"{x:.17g}" for x in b] + [f"{x:.17g}" for x in f]
        fh.write(",".join(row) + "\n")


def read_path_csv(fh) -> SamplePath:
    header = fh.readline().strip().split(",")
    if not header or header[0] != "t" or (len(header) - 1) % 2 != 0:
        raise ValueError("not a sample-path CSV (expected header t,b_1..,f_1..)")
    d = (len(header) - 1) // 2
    rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    grid = TimeGrid.custom(rows[:, 0])
    return SamplePath(grid, d, rows[:, 1:1 + d], rows[:, 1 + d:1 + 2 * d], 0, "file")
