"""Experiment configuration and its flat ``key=value`` file format.

Grammar (one entry per line, ``#`` starts a comment, blank lines ignored)::

    name=static-s1-under50          # optional, defaults to the file stem
    mode=static                     # static | dynamic
    population.z0=10000
    init.rel_error=-0.5             # or init.z_hat0=5000; z_hat0 = z0 * (1 + rel_error)
    filter.p00=1
    filter.q=0.1
    filter.j_warmup=3
    filter.phi_lo=0.25
    filter.phi_hi=10
    cusum.theta=4
    cusum.upsilon=0.5
    run.k_max=10
    run.seeds=100
    run.master_seed=12345
    sim.backend=exact               # exact | gaussian
    diagnostics.varsigma=0.5
    diagnostics.m_const=2
    diagnostics.epsilon0=2500       # optional
    summary.convergence_threshold=0.05
    summary.alarm_window=10
    schedule.event.1=step:50:+0.4zhat
    schedule.event.2=ramp:80:99:-2000
    schedule.event.3=walk:100:200:1sqrtzhat

Event magnitudes are absolute counts or multiples of ``z``, ``sqrtz``,
``zhat`` or ``sqrtzhat``. Every key except ``population.z0`` has the default
shown above (no events, no epsilon0). Unknown or repeated keys are errors.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .aloha import PopulationSchedule, ScheduleEvent
from .analysis import StabilityParams
from .cusum import CusumConfig
from .estimator import TuningParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    z0: int
    name: str = "experiment"
    mode: str = "static"
    z_hat0: float | None = None
    init_rel_error: float | None = None
    p00: float = 1.0
    q: float = 0.1
    j_warmup: int = 3
    phi_lo: float = 0.25
    phi_hi: float = 10.0
    theta: float = 4.0
    upsilon: float = 0.5
    k_max: int = 10
    seeds: int = 100
    master_seed: int = 12345
    backend: str = "exact"
    events: tuple[ScheduleEvent, ...] = ()
    diagnostics: StabilityParams = field(default_factory=StabilityParams)
    convergence_threshold: float = 0.05
    alarm_window: int = 10

    def __post_init__(self):
        try:
            self._validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def _validate(self):
        if self.mode not in ("static", "dynamic"):
            raise ValueError(f"mode must be static or dynamic, got {self.mode!r}")
        if self.backend not in ("exact", "gaussian"):
            raise ValueError(f"backend must be exact or gaussian, got {self.backend!r}")
        if self.z_hat0 is not None and self.init_rel_error is not None:
            raise ValueError("give init.z_hat0 or init.rel_error, not both")
        if self.k_max < 1:
            raise ValueError(f"run.k_max must be >= 1, got {self.k_max}")
        if self.seeds < 1:
            raise ValueError(f"run.seeds must be >= 1, got {self.seeds}")
        if self.master_seed < 0:
            raise ValueError(f"run.master_seed must be >= 0, got {self.master_seed}")
        if not self.p00 > 0:
            raise ValueError(f"filter.p00 must be positive, got {self.p00}")
        if not self.z_hat0_resolved > 0:
            raise ValueError(f"initial estimate must be positive, got {self.z_hat0_resolved}")
        if not 0 < self.convergence_threshold:
            raise ValueError("summary.convergence_threshold must be positive")
        if self.alarm_window < 0:
            raise ValueError("summary.alarm_window must be >= 0")
        # builds and validates the composite parameter objects
        self.tuning()
        self.cusum()
        self.schedule()

    @property
    def z_hat0_resolved(self) -> float:
        if self.z_hat0 is not None:
            return float(self.z_hat0)
        return self.z0 + self.z0 * (self.init_rel_error or 0.0)

    def tuning(self) -> TuningParams:
        return TuningParams(q=self.q, phi_lo=self.phi_lo, phi_hi=self.phi_hi, j_warmup=self.j_warmup)

    def cusum(self) -> CusumConfig:
        return CusumConfig(theta=self.theta, upsilon=self.upsilon)

    def schedule(self) -> PopulationSchedule:
        return PopulationSchedule(initial=self.z0, events=self.events)

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.to_items())

    def to_items(self) -> list[tuple[str, str]]:
        items = []
        for key, attr in _KEYS.items():
            if attr.startswith("diagnostics."):
                value = getattr(self.diagnostics, attr.split(".", 1)[1])
            else:
                value = getattr(self, attr)
            if value is not None:
                items.append((key, _fmt(value)))
        items += [(f"schedule.event.{i}", str(ev)) for i, ev in enumerate(self.events, 1)]
        return items


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


# file key -> attribute
_KEYS = {
    "name": "name",
    "mode": "mode",
    "population.z0": "z0",
    "init.z_hat0": "z_hat0",
    "init.rel_error": "init_rel_error",
    "filter.p00": "p00",
    "filter.q": "q",
    "filter.j_warmup": "j_warmup",
    "filter.phi_lo": "phi_lo",
    "filter.phi_hi": "phi_hi",
    "cusum.theta": "theta",
    "cusum.upsilon": "upsilon",
    "run.k_max": "k_max",
    "run.seeds": "seeds",
    "run.master_seed": "master_seed",
    "sim.backend": "backend",
    "summary.convergence_threshold": "convergence_threshold",
    "summary.alarm_window": "alarm_window",
    "diagnostics.varsigma": "diagnostics.varsigma",
    "diagnostics.m_const": "diagnostics.m_const",
    "diagnostics.epsilon0": "diagnostics.epsilon0",
}
_INT_ATTRS = {"z0", "j_warmup", "k_max", "seeds", "master_seed", "alarm_window"}
_STR_ATTRS = {"name", "mode", "backend"}


def _convert(attr: str, raw: str):
    if attr in _STR_ATTRS:
        return raw
    if attr in _INT_ATTRS:
        return int(raw)
    return float(raw)


def parse_config(text: str, default_name: str = "experiment") -> ExperimentConfig:
    values: dict[str, object] = {"name": default_name}
    diag: dict[str, float] = {}
    events: list[tuple[int, ScheduleEvent]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            if key.startswith("schedule.event."):
                idx = int(key.rsplit(".", 1)[1])
                events.append((idx, ScheduleEvent.parse(raw)))
                continue
            if key not in _KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            attr = _KEYS[key]
            if attr.startswith("diagnostics."):
                diag[attr.split(".", 1)[1]] = float(raw)
            else:
                values[attr] = _convert(attr, raw)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    if "z0" not in values:
        raise ConfigError("missing required key population.z0")
    try:
        values["diagnostics"] = StabilityParams(**diag)
        values["events"] = tuple(ev for _, ev in sorted(events, key=lambda t: t[0]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(**values)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, default_name=path.stem)


SCENARIO_DIR = Path(__file__).parent / "scenarios"


def shipped_scenarios() -> dict[str, Path]:
    return {p.stem: p for p in sorted(SCENARIO_DIR.glob("*.cfg"))}


def resolve_config(ref: str) -> ExperimentConfig:
    """Load a config from a path, or by the name of a shipped scenario."""
    path = Path(ref)
    if not path.exists():
        scenarios = shipped_scenarios()
        if ref in scenarios:
            path = scenarios[ref]
    return load_config(path)
