"""Parameter sweeps over field orientation, flux and coil eccentricity.

A :class:`SweepPlan` names the swept quantity, its grid, and the fixed
base configuration.  :func:`run_sweep` evaluates every grid point
independently (optionally in worker processes) and returns rows in grid
order; :func:`emit` writes them as CSV or JSON.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .eigen import eigh
from .field import FieldSpec
from .geometry import DEFAULT_QUAD_POINTS, HelixSpec
from .hamiltonian import BasisSpec, assemble
from .observables import CurrentModel, toroidal_moment

KINDS = ("theta", "flux_tau0", "flux_tau1", "eccentricity_b", "eccentricity_a", "single_point")

COLUMNS = (
    "sweep_param", "R", "a", "b", "omega", "p", "alpha", "tau0", "tau1",
    "theta", "phi_M", "eigenvalue", "TM_x", "TM_y", "TM_z", "error",
)
INT_COLUMNS = ("omega", "p", "alpha")

WORKERS_ENV = "HELIXMOMENTS_WORKERS"

# tau0 = 2 is the flux of the eccentricity sweeps; theta sweeps use the same
# magnitude so tau0(theta=0) = 2
DEFAULT_TAU_MAX = 2.0
THETA_POINTS = 241
FLUX_POINTS = 101
FLUX_MAX = 5.0
ECCENTRICITY_GRID = (0.1, 0.9, 9)

CONFIGURATIONS = {
    "circular": (0.5, 0.5),
    "tall": (0.25, 0.75),
    "flat": (0.75, 0.25),
}


@dataclass(frozen=True)
class SweepPlan:
    kind: str
    grid: tuple
    helix: HelixSpec = HelixSpec()
    tau0: float = 0.0
    tau1: float = 0.0
    tau_max: float = DEFAULT_TAU_MAX
    theta: float | None = None
    phi_M: float = 0.0
    p_list: tuple = (0,)
    n_max: int = 2
    quad_points: int = DEFAULT_QUAD_POINTS
    current_model: str = CurrentModel.PARAMAGNETIC.value
    include_vmag: bool = True
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; expected one of {KINDS}")
        grid = tuple(float(g) for g in self.grid)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "p_list", tuple(int(p) for p in self.p_list))
        if not grid:
            raise ValueError("empty sweep grid")
        if len(grid) > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("sweep grid must be strictly increasing")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        CurrentModel(self.current_model)
        for value in grid:
            self.point(value)  # validates the helix at every grid point

    def point(self, value: float) -> tuple[HelixSpec, FieldSpec, float]:
        """Helix, field and polar angle at one grid value."""
        helix = self.helix
        if self.kind == "eccentricity_a":
            helix = replace(helix, a=value)
        elif self.kind == "eccentricity_b":
            helix = replace(helix, b=value)

        if self.kind == "theta":
            theta = value
        elif self.theta is not None:
            theta = self.theta
        else:
            theta = None

        if theta is not None:
            fs = FieldSpec.from_polar(self.tau_max, theta, self.phi_M)
        elif self.kind == "flux_tau0":
            fs = FieldSpec(value, self.tau1, self.phi_M)
        elif self.kind == "flux_tau1":
            fs = FieldSpec(self.tau0, value, self.phi_M)
        else:
            fs = FieldSpec(self.tau0, self.tau1, self.phi_M)
        if theta is None:
            theta = fs.theta
        return helix, fs, theta

    def resolved(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["p_list"] = list(self.p_list)
        return d


@dataclass(frozen=True)
class SweepRow:
    sweep_param: float
    R: float
    a: float
    b: float
    omega: int
    p: int
    alpha: int | None
    tau0: float
    tau1: float
    theta: float
    phi_M: float
    eigenvalue: float
    TM_x: float
    TM_y: float
    TM_z: float
    error: str = ""

    @property
    def moment(self) -> np.ndarray:
        return np.array([self.TM_x, self.TM_y, self.TM_z])


def _evaluate_point(plan: SweepPlan, value: float) -> list[SweepRow]:
    helix, fs, theta = plan.point(value)
    common = dict(
        sweep_param=value, R=helix.R, a=helix.a, b=helix.b, omega=helix.omega,
        tau0=fs.tau0, tau1=fs.tau1, theta=theta, phi_M=fs.phi_M,
    )
    rows = []
    for p in plan.p_list:
        basis = BasisSpec(p, plan.n_max, plan.quad_points)
        try:
            H = assemble(helix, fs, basis, include_vmag=plan.include_vmag)
            sol = eigh(H, allow_non_hermitian=not plan.include_vmag)
            for alpha in range(sol.dim):
                tm = toroidal_moment(helix, basis, sol, alpha, plan.current_model, fs)
                rows.append(SweepRow(
                    p=p, alpha=alpha, eigenvalue=float(sol.eigenvalues[alpha]),
                    TM_x=float(tm[0]), TM_y=float(tm[1]), TM_z=float(tm[2]), **common,
                ))
        except Exception as exc:  # one bad point must not sink the sweep
            nan = float("nan")
            rows.append(SweepRow(
                p=p, alpha=None, eigenvalue=nan, TM_x=nan, TM_y=nan, TM_z=nan,
                error=f"{type(exc).__name__}: {exc}", **common,
            ))
    return rows


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


def run_sweep(plan: SweepPlan, workers: int | None = None) -> list[SweepRow]:
    """Evaluate the plan; row order follows the grid, then p, then alpha."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(plan.grid) == 1:
        chunks = [_evaluate_point(plan, v) for v in plan.grid]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_point, [plan] * len(plan.grid), plan.grid))
    return [row for chunk in chunks for row in chunk]


# --- serialisation ------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_rows(rows, fh, format: str = "csv") -> None:
    """Serialise rows to an open text stream."""
    if format == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    elif format == "json":
        payload = []
        for row in rows:
            obj = {}
            for c in COLUMNS:
                v = getattr(row, c)
                if isinstance(v, float) and not math.isfinite(v):
                    v = None
                obj[c] = v
            payload.append(obj)
        fh.write(json.dumps(payload, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def emit(rows, path, format: str = "csv") -> Path:
    """Write rows to ``path`` as CSV or a JSON array of objects."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            write_rows(rows, fh, format)
    except OSError as exc:
        raise OSError(f"could not write sweep output to {path}: {exc}") from exc
    return path


def _parse_value(column, text):
    if column == "error":
        return text or ""
    if text in ("", None):
        return None if column == "alpha" else float("nan")
    if column in INT_COLUMNS:
        return int(text)
    return float(text)


def read_rows(path) -> list[SweepRow]:
    """Inverse of :func:`emit`; the format is taken from the suffix."""
    path = Path(path)
    if path.suffix == ".json":
        rows = []
        for obj in json.loads(path.read_text()):
            vals = {c: (float("nan") if obj[c] is None and c not in ("alpha", "error") else obj[c])
                    for c in COLUMNS}
            rows.append(SweepRow(**vals))
        return rows
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        return [SweepRow(**{c: _parse_value(c, r[c]) for c in COLUMNS}) for r in reader]


def write_params(plan: SweepPlan, path) -> Path:
    """Sidecar with the fully resolved plan, next to the data file."""
    path = Path(path)
    side = path.with_name(path.name + ".params.json")
    side.write_text(json.dumps(plan.resolved(), indent=1, sort_keys=True) + "\n")
    return side


# --- grids and presets --------------------------------------------------

def theta_grid(n: int = THETA_POINTS) -> tuple:
    return tuple(np.linspace(0.0, 2 * np.pi, n))


def flux_grid(stop: float = FLUX_MAX, n: int = FLUX_POINTS) -> tuple:
    return tuple(np.linspace(0.0, stop, n))


def eccentricity_grid(start=ECCENTRICITY_GRID[0], stop=ECCENTRICITY_GRID[1], n=ECCENTRICITY_GRID[2]):
    return tuple(np.round(np.linspace(start, stop, n), 12))


def parse_grid(text: str) -> tuple:
    """``"start:stop:num"`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        start, stop, num = text.split(":")
        return tuple(np.linspace(float(start), float(stop), int(num)))
    return tuple(float(v) for v in text.split(","))


def _default_grid(kind):
    return {
        "theta": theta_grid,
        "flux_tau0": flux_grid,
        "flux_tau1": flux_grid,
        "eccentricity_a": eccentricity_grid,
        "eccentricity_b": eccentricity_grid,
        "single_point": lambda: (0.0,),
    }[kind]()


# name -> (description, kind, configuration, omega, p_list, extra plan fields)
PRESET_TABLE = {
    "fig1a": ("circular, 4 turns, p=0, field tilt", "theta", "circular", 4, (0,), {}),
    "fig1b": ("circular, 8 turns, p=0, field tilt", "theta", "circular", 8, (0,), {}),
    "fig2a": ("tall, 4 turns, p=0, field tilt", "theta", "tall", 4, (0,), {}),
    "fig2b": ("flat, 4 turns, p=0, field tilt", "theta", "flat", 4, (0,), {}),
    "fig2c": ("tall, 8 turns, p=0, field tilt", "theta", "tall", 8, (0,), {}),
    "fig2d": ("flat, 8 turns, p=0, field tilt", "theta", "flat", 8, (0,), {}),
    "fig3a": ("circular, 4 turns, p=1, field tilt", "theta", "circular", 4, (1,), {}),
    "fig3b": ("circular, 8 turns, p=1, field tilt", "theta", "circular", 8, (1,), {}),
    "fig4a": ("tall, 4 turns, p=1, field tilt", "theta", "tall", 4, (1,), {}),
    "fig4b": ("flat, 4 turns, p=1, field tilt", "theta", "flat", 4, (1,), {}),
    "fig4c": ("tall, 8 turns, p=1, field tilt", "theta", "tall", 8, (1,), {}),
    "fig4d": ("flat, 8 turns, p=1, field tilt", "theta", "flat", 8, (1,), {}),
    "fig5a": ("circular, 4 turns, p=2, field tilt", "theta", "circular", 4, (2,), {}),
    "fig5b": ("circular, 8 turns, p=2, field tilt", "theta", "circular", 8, (2,), {}),
    "fig6a": ("tall, 4 turns, p=2, field tilt", "theta", "tall", 4, (2,), {}),
    "fig6b": ("flat, 4 turns, p=2, field tilt", "theta", "flat", 4, (2,), {}),
    "fig6c": ("tall, 8 turns, p=2, field tilt", "theta", "tall", 8, (2,), {}),
    "fig6d": ("flat, 8 turns, p=2, field tilt", "theta", "flat", 8, (2,), {}),
    "fig7a": ("circular, 4 turns, p=0 and 2, vertical flux", "flux_tau0", "circular", 4, (0, 2), {}),
    "fig7b": ("circular, 8 turns, p=0 and 2, vertical flux", "flux_tau0", "circular", 8, (0, 2), {}),
    "fig8a": ("tall, 4 turns, p=0, vertical flux", "flux_tau0", "tall", 4, (0,), {}),
    "fig8b": ("flat, 4 turns, p=0, vertical flux", "flux_tau0", "flat", 4, (0,), {}),
    "fig8c": ("tall, 8 turns, p=0, vertical flux", "flux_tau0", "tall", 8, (0,), {}),
    "fig8d": ("flat, 8 turns, p=0, vertical flux", "flux_tau0", "flat", 8, (0,), {}),
    "fig9a": ("a=0.25, 4 turns, p=2, b from 0.1 to 0.9, tau0=2", "eccentricity_b", "tall", 4, (2,), {"tau0": 2.0}),
    "fig9b": ("a=0.25, 8 turns, p=2, b from 0.1 to 0.9, tau0=2", "eccentricity_b", "tall", 8, (2,), {"tau0": 2.0}),
    "fig10a": ("b=0.25, 4 turns, p=2, a from 0.1 to 0.9, tau0=2", "eccentricity_a", "flat", 4, (2,), {"tau0": 2.0}),
    "fig10b": ("b=0.25, 8 turns, p=2, a from 0.1 to 0.9, tau0=2", "eccentricity_a", "flat", 8, (2,), {"tau0": 2.0}),
}

# flux sweeps along both axes for every configuration and p
for _conf in CONFIGURATIONS:
    for _w in (4, 8):
        PRESET_TABLE[f"tau0-{_conf}-w{_w}"] = (
            f"{_conf}, {_w} turns, p=0,1,2, vertical flux, tau1=0",
            "flux_tau0", _conf, _w, (0, 1, 2), {},
        )
        PRESET_TABLE[f"tau1-{_conf}-w{_w}"] = (
            f"{_conf}, {_w} turns, p=0,1,2, in-plane flux, tau0=0",
            "flux_tau1", _conf, _w, (0, 1, 2), {},
        )


def preset_names() -> list[str]:
    return list(PRESET_TABLE)


def preset(name: str, **overrides) -> SweepPlan:
    try:
        _, kind, conf, omega, p_list, extra = PRESET_TABLE[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; see --list-presets") from None
    a, b = CONFIGURATIONS[conf]
    fields = dict(
        kind=kind, grid=_default_grid(kind), helix=HelixSpec(1.0, a, b, omega),
        p_list=p_list, **extra,
    )
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return SweepPlan(**fields)


# --- config files -------------------------------------------------------

_FLOAT_KEYS = ("R", "a", "b", "tau0", "tau1", "theta", "phi_M", "B_max", "R_meters")
_INT_KEYS = ("omega", "n_max", "quad_points", "workers")


def _coerce(key, value):
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        return int(value)
    if key == "p_list":
        if isinstance(value, str):
            return tuple(int(v) for v in value.replace(" ", "").split(",") if v)
        return tuple(int(v) for v in value)
    if key == "include_vmag":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if key == "grid" and not isinstance(value, str):
        return tuple(float(v) for v in value)
    return value


def load_config(path) -> dict:
    """Read ``key = value`` lines (``#`` comments) or a JSON object.

    Recognised keys: R, a, b, omega, p_list, n_max, quad_points, sweep,
    grid, tau0, tau1, theta, phi_M, B_max, R_meters, current_model,
    include_vmag, output, format, preset, workers.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        raw = json.loads(text)
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = value
    return {k: _coerce(k, v) for k, v in raw.items()}
