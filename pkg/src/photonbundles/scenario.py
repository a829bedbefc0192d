"""Scenario files: the single source of truth for named experiment parameters.

A scenario is a YAML document with a fixed schema; every knob a run needs
(model constants, truncation, pulse geometry, decay rates, grids, seeds)
lives in the file so that runs are reproducible from the artifact alone.
Unknown keys are rejected rather than ignored, which catches typos that
would otherwise silently fall back to defaults.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml

from .drive import BundleTarget, PulseTrain
from .dynamics import DecayRates, default_retained_count
from .errors import ParseError, ValidationError
from .hilbert import ModelParams, SpaceConfig

logger = logging.getLogger(__name__)

KINDS = ("closed", "master", "trajectory", "correlators", "coeff-sweep")

# saturated-emission guard: with kappa_a * period below this the cavity has
# not emptied between reload cycles and per-cycle bookkeeping is unreliable
CYCLE_SEPARATION_MIN = 5.0

DEFAULT_CYCLES = {"closed": 1, "master": 3, "trajectory": 3, "correlators": 1}
DEFAULT_POINTS_PER_CYCLE = {
    "closed": 241,
    "master": 561,
    "trajectory": 49,
    "correlators": 181,
}

_MISSING = object()


@dataclass(frozen=True)
class SweepSpec:
    """Coupling-strength sweep of the dressed-state photon-content coefficients."""

    coupling_min: float = 0.0
    coupling_max: float = 1.5
    points: int = 151
    max_occupation: int = 7

    def __post_init__(self):
        if not self.coupling_min <= self.coupling_max:
            raise ValidationError("sweep requires coupling_min <= coupling_max")
        if self.points < 2:
            raise ValidationError("sweep needs at least 2 points")
        if self.max_occupation < 2:
            raise ValidationError("sweep max_occupation must be >= 2")


@dataclass(frozen=True)
class Scenario:
    """Fully validated description of one named experiment.

    Pulse amplitudes are stored as (first amplitude, second/first ratio) to
    match how the drive strengths are normally quoted; carriers are solved
    from the spectrum at run time, never stored.
    """

    name: str
    kind: str
    model: ModelParams
    space: SpaceConfig
    target: BundleTarget | None
    amp_first: float
    amp_ratio: float
    center_first: float
    center_second: float
    width: float
    period: float
    decay: DecayRates
    initial_state: str
    seed: int = 1
    n_traj: int = 500
    n_keep: int | None = None
    cycles: int | None = None
    points_per_cycle: int | None = None
    correlator_orders: tuple[int, ...] = (1,)
    tau_points: int = 300
    sweep: SweepSpec | None = None
    out_dir: str = ""
    description: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(
                f"unknown run kind {self.kind!r}; expected one of {', '.join(KINDS)}"
            )
        if min(self.decay.a, self.decay.ge, self.decay.bg) < 0:
            raise ValidationError("decay rates must be nonnegative")
        if self.kind == "coeff-sweep":
            if self.sweep is None:
                raise ValidationError("coeff-sweep scenarios need a sweep section")
            return
        if self.target is None:
            raise ValidationError(f"{self.kind} scenarios need a target section")
        if self.amp_first <= 0 or self.amp_ratio <= 0:
            raise ValidationError("pulse amplitudes must be positive")
        if self.width <= 0 or self.period <= 0:
            raise ValidationError("pulse width and period must be positive")
        if self.kind == "trajectory" and self.n_traj < 1:
            raise ValidationError("trajectory scenarios need n_traj >= 1")
        if self.kind == "correlators" and not self.correlator_orders:
            raise ValidationError("correlators scenarios need at least one order")
        if any(n < 1 for n in self.correlator_orders):
            raise ValidationError("correlator orders must be positive integers")
        if not self.initial_state:
            raise ValidationError("initial_state label is required")
        if self.kind in ("master", "trajectory", "correlators"):
            sep = self.decay.a * self.period
            if sep < CYCLE_SEPARATION_MIN:
                logger.warning(
                    "cavity decay x period = %.3g < %.3g: bundles from adjacent "
                    "cycles overlap and per-cycle statistics are unreliable",
                    sep,
                    CYCLE_SEPARATION_MIN,
                )

    # ---- derived quantities -------------------------------------------

    @property
    def resolved_cycles(self) -> int:
        if self.cycles is not None:
            return self.cycles
        return DEFAULT_CYCLES.get(self.kind, 1)

    @property
    def resolved_points_per_cycle(self) -> int:
        if self.points_per_cycle is not None:
            return self.points_per_cycle
        return DEFAULT_POINTS_PER_CYCLE.get(self.kind, 241)

    @property
    def resolved_n_keep(self) -> int:
        if self.n_keep is not None:
            return self.n_keep
        assert self.target is not None
        return default_retained_count(self.target)

    def pulse_train(self, cycles: int | None = None) -> PulseTrain:
        """Build the pulse train for the requested number of cycles (carriers unsolved)."""
        return PulseTrain(
            amp_peak=(self.amp_first, self.amp_first * self.amp_ratio),
            center_first=(self.center_first, self.center_second),
            width=self.width,
            period=self.period,
            n_cycles=self.resolved_cycles if cycles is None else cycles,
        )

    def to_dict(self) -> dict:
        """Schema-shaped plain dict, suitable for YAML/JSON round trips."""
        doc: dict = {"name": self.name, "kind": self.kind}
        if self.description:
            doc["description"] = self.description
        doc["model"] = {
            "omega_c": self.model.omega_c,
            "omega_e": self.model.omega_e,
            "omega_g": self.model.omega_g,
            "omega_b": self.model.omega_b,
            "coupling": self.model.coupling,
        }
        doc["space"] = {"n_fock": self.space.n_fock}
        if self.n_keep is not None:
            doc["space"]["n_keep"] = self.n_keep
        if self.target is not None:
            doc["target"] = {
                "mediator": self.target.n,
                "seed_occupation": self.target.M,
                "pairs_per_cycle": self.target.m,
                "detuning": self.target.detuning,
            }
        doc["pulses"] = {
            "amp_first": self.amp_first,
            "amp_ratio": self.amp_ratio,
            "center_first": self.center_first,
            "center_second": self.center_second,
            "width": self.width,
            "period": self.period,
        }
        doc["decay"] = {"cavity": self.decay.a, "upper": self.decay.ge, "lower": self.decay.bg}
        doc["run"] = {
            "initial_state": self.initial_state,
            "seed": self.seed,
            "n_traj": self.n_traj,
            "correlator_orders": list(self.correlator_orders),
            "tau_points": self.tau_points,
        }
        if self.cycles is not None:
            doc["run"]["cycles"] = self.cycles
        if self.points_per_cycle is not None:
            doc["run"]["points_per_cycle"] = self.points_per_cycle
        if self.sweep is not None:
            doc["sweep"] = {
                "coupling_min": self.sweep.coupling_min,
                "coupling_max": self.sweep.coupling_max,
                "points": self.sweep.points,
                "max_occupation": self.sweep.max_occupation,
            }
        if self.out_dir:
            doc["output"] = {"dir": self.out_dir}
        return doc


def scenario_hash(s: Scenario) -> str:
    """Stable content hash of the resolved scenario (not of the file bytes)."""
    blob = json.dumps(s.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---- strict schema walking ------------------------------------------------


def _reject_unknown(section: dict, path: str) -> None:
    if section:
        keys = ", ".join(sorted(map(str, section)))
        raise ParseError(f"unknown key(s) under {path or 'top level'}: {keys}")


def _take(section: dict, key: str, path: str, cast, default=_MISSING):
    if key not in section:
        if default is _MISSING:
            raise ParseError(f"missing required key {path}.{key}" if path else f"missing required key {key}")
        return default
    raw = section.pop(key)
    try:
        if cast is float:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise TypeError
            return float(raw)
        if cast is int:
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise TypeError
            return int(raw)
        if cast is str:
            if not isinstance(raw, str):
                raise TypeError
            return raw
        return cast(raw)
    except (TypeError, ValueError):
        where = f"{path}.{key}" if path else key
        raise ParseError(f"key {where} has invalid value {raw!r}") from None


def _subsection(doc: dict, key: str, required: bool = True) -> dict:
    raw = doc.pop(key, _MISSING)
    if raw is _MISSING:
        if required:
            raise ParseError(f"missing required section {key!r}")
        return {}
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ParseError(f"section {key!r} must be a mapping, got {type(raw).__name__}")
    return raw


def _int_list(raw) -> tuple[int, ...]:
    if not isinstance(raw, (list, tuple)) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in raw
    ):
        raise TypeError
    return tuple(raw)


def scenario_from_dict(doc: dict) -> Scenario:
    """Validate a schema-shaped dict into a Scenario; rejects unknown keys."""
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a mapping")
    doc = {k: (dict(v) if isinstance(v, dict) else v) for k, v in doc.items()}

    name = _take(doc, "name", "", str)
    kind = _take(doc, "kind", "", str)
    description = _take(doc, "description", "", str, default="")

    sec = _subsection(doc, "model")
    model_kwargs = {
        k: _take(sec, k, "model", float, default=getattr(ModelParams, k))
        for k in ("omega_c", "omega_e", "omega_g", "omega_b", "coupling")
    }
    _reject_unknown(sec, "model")
    try:
        model = ModelParams(**model_kwargs)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    sec = _subsection(doc, "space")
    n_fock = _take(sec, "n_fock", "space", int)
    n_keep = _take(sec, "n_keep", "space", int, default=None)
    _reject_unknown(sec, "space")
    try:
        space = SpaceConfig(n_fock=n_fock)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    sec = _subsection(doc, "target", required=kind != "coeff-sweep")
    target = None
    if sec:
        target = BundleTarget(
            n=_take(sec, "mediator", "target", int),
            M=_take(sec, "seed_occupation", "target", int),
            m=_take(sec, "pairs_per_cycle", "target", int),
            detuning=_take(sec, "detuning", "target", float, default=0.0),
        )
        _reject_unknown(sec, "target")

    sec = _subsection(doc, "pulses", required=kind != "coeff-sweep")
    amp_first = _take(sec, "amp_first", "pulses", float, default=1.0)
    amp_ratio = _take(sec, "amp_ratio", "pulses", float, default=1.0)
    center_first = _take(sec, "center_first", "pulses", float, default=0.0)
    center_second = _take(sec, "center_second", "pulses", float, default=0.0)
    width = _take(sec, "width", "pulses", float, default=1.0)
    period = _take(sec, "period", "pulses", float, default=1.0)
    _reject_unknown(sec, "pulses")

    sec = _subsection(doc, "decay", required=False)
    decay = DecayRates(
        a=_take(sec, "cavity", "decay", float, default=0.0),
        ge=_take(sec, "upper", "decay", float, default=0.0),
        bg=_take(sec, "lower", "decay", float, default=0.0),
    )
    _reject_unknown(sec, "decay")

    sec = _subsection(doc, "run", required=False)
    run_kwargs = dict(
        initial_state=_take(sec, "initial_state", "run", str, default="b0"),
        seed=_take(sec, "seed", "run", int, default=1),
        n_traj=_take(sec, "n_traj", "run", int, default=500),
        cycles=_take(sec, "cycles", "run", int, default=None),
        points_per_cycle=_take(sec, "points_per_cycle", "run", int, default=None),
        correlator_orders=_take(sec, "correlator_orders", "run", _int_list, default=(1,)),
        tau_points=_take(sec, "tau_points", "run", int, default=300),
    )
    _reject_unknown(sec, "run")

    sec = _subsection(doc, "sweep", required=False)
    sweep = None
    if sec:
        sweep = SweepSpec(
            coupling_min=_take(sec, "coupling_min", "sweep", float, default=0.0),
            coupling_max=_take(sec, "coupling_max", "sweep", float, default=1.5),
            points=_take(sec, "points", "sweep", int, default=151),
            max_occupation=_take(sec, "max_occupation", "sweep", int, default=7),
        )
        _reject_unknown(sec, "sweep")

    sec = _subsection(doc, "output", required=False)
    out_dir = _take(sec, "dir", "output", str, default="")
    _reject_unknown(sec, "output")

    _reject_unknown(doc, "")

    return Scenario(
        name=name,
        kind=kind,
        model=model,
        space=space,
        target=target,
        amp_first=amp_first,
        amp_ratio=amp_ratio,
        center_first=center_first,
        center_second=center_second,
        width=width,
        period=period,
        decay=decay,
        n_keep=n_keep,
        sweep=sweep,
        out_dir=out_dir,
        description=description,
        **run_kwargs,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"scenario file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ParseError(f"malformed scenario file {path}{loc}: {exc}") from None
    try:
        return scenario_from_dict(doc)
    except (ParseError, ValidationError) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def save_scenario(s: Scenario, path: str | Path) -> None:
    """Write a scenario back out; load_scenario(save_scenario(s)) == s."""
    Path(path).write_text(yaml.safe_dump(s.to_dict(), sort_keys=False))


def apply_overrides(s: Scenario, overrides: dict[str, object]) -> Scenario:
    """Apply dotted-path overrides (e.g. ``pulses.width=2000``) to a scenario.

    Values go through the same schema validation as file input, so an
    override can never construct a scenario that a file could not.
    """
    if not overrides:
        return s
    doc = s.to_dict()
    for dotted, value in overrides.items():
        parts = dotted.split(".")
        node = doc
        for part in parts[:-1]:
            nxt = node.get(part)
            if not isinstance(nxt, dict):
                nxt = {}
                node[part] = nxt
            node = nxt
        node[parts[-1]] = value
    return scenario_from_dict(doc)
