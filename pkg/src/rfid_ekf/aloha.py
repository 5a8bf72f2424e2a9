"""Framed-slotted ALOHA at slot-occupancy level, plus population schedules.

Each of the z tags picks one of the L slots uniformly at random; the reader
only learns which slots stayed idle.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .estimator import round_half_away

SLOT_MS = 0.4
GAUSSIAN_MIN_SIZE = 100


@dataclass(frozen=True)
class FrameResult:
    frame_size: int
    idle_count: int
    frame_seed: int | None = None
    # 1 = occupied slot; only filled when requested
    bits: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def occupied_count(self) -> int:
        return self.frame_size - self.idle_count

    @property
    def idle_frequency(self) -> float:
        return self.idle_count / self.frame_size

    @property
    def duration_ms(self) -> float:
        return frame_duration_ms(self.frame_size)


def frame_duration_ms(frame_size: int) -> float:
    return SLOT_MS * frame_size


def frame_seed(master_seed: int, run_index: int, k: int, stream: int = 0) -> int:
    """Per-frame seed derived from (master seed, run, frame, stream).

    Stream 0 drives slot choices, stream 1 drives population changes, so a
    schedule never perturbs the slot draws.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(run_index, k, stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_rng(rng) -> tuple[np.random.Generator, int | None]:
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = int(rng)
    return np.random.default_rng(seed), seed


def run_frame(z_true: int, frame_size: int, rng, emit_bits: bool = False) -> FrameResult:
    """Exact balls-into-bins frame. ``rng`` is a Generator or an integer seed."""
    if z_true < 0 or frame_size < 1:
        raise ValueError(f"need z >= 0 and L >= 1, got z={z_true}, L={frame_size}")
    gen, seed = _as_rng(rng)
    occupied = np.zeros(frame_size, dtype=bool)
    occupied[gen.integers(0, frame_size, size=z_true)] = True
    idle = frame_size - int(np.count_nonzero(occupied))
    bits = occupied.astype(np.uint8) if emit_bits else None
    return FrameResult(frame_size=frame_size, idle_count=idle, frame_seed=seed, bits=bits)


def idle_count_moments(z: int, L: int) -> tuple[float, float]:
    """Exact mean and variance of the idle-slot count for z tags in L slots."""
    if L == 1:
        return (1.0, 0.0) if z == 0 else (0.0, 0.0)
    p1 = math.exp(z * math.log1p(-1.0 / L))
    if L == 2:
        p2 = 1.0 if z == 0 else 0.0
    else:
        p2 = math.exp(z * math.log1p(-2.0 / L))
    mu = L * p1
    var = L * (L - 1) * p2 + mu - mu * mu
    return mu, max(var, 0.0)


def run_frame_gaussian(z_true: int, frame_size: int, rng) -> FrameResult:
    """Normal approximation of the idle count; exact simulation below 100 tags or slots."""
    if z_true < GAUSSIAN_MIN_SIZE or frame_size < GAUSSIAN_MIN_SIZE:
        return run_frame(z_true, frame_size, rng)
    gen, seed = _as_rng(rng)
    mu, var = idle_count_moments(z_true, frame_size)
    n = round_half_away(gen.normal(mu, math.sqrt(var)))
    n = min(max(n, 0), frame_size)
    return FrameResult(frame_size=frame_size, idle_count=n, frame_seed=seed)


_MAG_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(sqrtzhat|zhat|sqrtz|z)?$")


@dataclass(frozen=True)
class Magnitude:
    """A tag-count change, either absolute or scaled by z, sqrt(z), z_hat or sqrt(z_hat)."""

    value: float
    base: str = "abs"

    @classmethod
    def parse(cls, text: str) -> Magnitude:
        m = _MAG_RE.match(text.strip())
        if not m:
            raise ValueError(f"bad magnitude {text!r}")
        return cls(float(m.group(1)), m.group(2) or "abs")

    def resolve(self, z_true: float, z_hat: float) -> float:
        scale = {
            "abs": 1.0,
            "z": z_true,
            "sqrtz": math.sqrt(max(z_true, 0.0)),
            "zhat": z_hat,
            "sqrtzhat": math.sqrt(max(z_hat, 0.0)),
        }[self.base]
        return self.value * scale

    def __str__(self) -> str:
        v = repr(self.value)
        sign = "" if v.startswith("-") else "+"
        return f"{sign}{v}{'' if self.base == 'abs' else self.base}"


@dataclass(frozen=True)
class ScheduleEvent:
    """``step`` fires at ``start``; ``ramp`` and ``walk`` cover ``start..end`` inclusive.

    For a ramp the magnitude is the total change over the interval; for a walk
    it is the per-frame standard deviation.
    """

    kind: str
    start: int
    magnitude: Magnitude
    end: int | None = None

    def __post_init__(self):
        if self.kind not in ("step", "ramp", "walk"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.start < 1:
            raise ValueError(f"event frame must be >= 1, got {self.start}")
        if self.kind == "step":
            if self.end is not None:
                raise ValueError("step events take a single frame")
        elif self.end is None or self.end < self.start:
            raise ValueError(f"{self.kind} needs end >= start, got {self.start}..{self.end}")
        if self.kind == "walk" and self.magnitude.value < 0:
            raise ValueError("walk sigma must be >= 0")

    @property
    def last(self) -> int:
        return self.start if self.end is None else self.end

    def covers(self, k: int) -> bool:
        return self.start <= k <= self.last

    @classmethod
    def parse(cls, text: str) -> ScheduleEvent:
        """``step:K:MAG``, ``ramp:K1:K2:MAG`` or ``walk:K1:K2:SIGMA``."""
        parts = text.strip().split(":")
        kind = parts[0]
        try:
            if kind == "step" and len(parts) == 3:
                return cls("step", int(parts[1]), Magnitude.parse(parts[2]))
            if kind in ("ramp", "walk") and len(parts) == 4:
                return cls(kind, int(parts[1]), Magnitude.parse(parts[3]), end=int(parts[2]))
        except ValueError as exc:
            raise ValueError(f"bad schedule event {text!r}: {exc}") from None
        raise ValueError(f"bad schedule event {text!r}")

    def __str__(self) -> str:
        if self.kind == "step":
            return f"step:{self.start}:{self.magnitude}"
        return f"{self.kind}:{self.start}:{self.end}:{self.magnitude}"


@dataclass(frozen=True)
class PopulationSchedule:
    initial: int
    events: tuple[ScheduleEvent, ...] = ()

    def __post_init__(self):
        if self.initial < 0:
            raise ValueError(f"initial population must be >= 0, got {self.initial}")
        object.__setattr__(self, "events", tuple(sorted(self.events, key=lambda e: (e.start, e.kind))))
        spans = [e for e in self.events if e.kind != "step"]
        for a, b in zip(spans, spans[1:]):
            if b.start <= a.last:
                raise ValueError(f"overlapping schedule intervals: {a} and {b}")

    @property
    def is_static(self) -> bool:
        return not self.events


def evolve_population(
    schedule: PopulationSchedule, k: int, z_current: int, z_hat_context: float, rng
) -> tuple[int, int]:
    """Change applied before frame ``k``: returns (w, max(0, z_current + w)).

    Relative magnitudes are resolved against the current true count and the
    reader's prior estimate for frame ``k``.
    """
    w = 0
    for ev in schedule.events:
        if not ev.covers(k):
            continue
        amount = ev.magnitude.resolve(z_current, z_hat_context)
        if ev.kind == "step":
            w += round_half_away(amount)
        elif ev.kind == "ramp":
            n = ev.end - ev.start + 1
            i = k - ev.start
            w += round_half_away(amount * (i + 1) / n) - round_half_away(amount * i / n)
        else:
            gen, _ = _as_rng(rng)
            w += round_half_away(gen.normal(0.0, amount)) if amount > 0 else 0
    z_next = max(0, z_current + w)
    return z_next - z_current, z_next
