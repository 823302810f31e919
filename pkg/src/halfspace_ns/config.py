"""Run configuration: a single JSON document, overridable from the command line.

Every run echoes its fully resolved configuration next to its artifacts so
results are reproducible from the output directory alone.
"""

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .geometry import (BoundaryShape, flat_shape, gaussian_bump_shape,
                       make_grid, tabulated_shape)
from .params import PhysicalParams
from .profile import decay_rate
from .solver import SolverConfig

SCENARIOS = ("profile", "steady", "stability", "contraction", "verify")

DEFAULTS = {
    "physical": {
        "K": 1.0, "gamma": 1.0, "mu1": 1.0, "mu2": 0.0,
        "rho_plus": 1.0, "u_plus": -2.0, "u_tilde_b": -3.0,
    },
    "shape": {
        "kind": "flat", "amplitude": 0.3, "width": 1.0, "cell": [8.0, 8.0],
        "samples": None,
    },
    "boundary": {"mode": "planar", "samples": None, "scale": 1.0},
    "grid": {"dimension": 2, "nodes": [64, 32, 32], "length": None},
    "solver": {
        "dt": None, "t_end": 40.0, "cfl_safety": 0.4, "upwind_order": 2,
        "report_interval": 0.5,
    },
    "scenario": "profile",
    "tolerances": {
        "steady_tol": 1e-8, "T_star": 2.0, "max_time": 400.0,
        "profile_resolution": 512, "slack_per_unit_time": 1e-3,
        "perturbation_amplitude": 1e-3,
    },
    "output_dir": "out",
    "seed": 1234,
}


@dataclass
class RunConfig:
    raw: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            try:
                user = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(user)

    @classmethod
    def from_dict(cls, user: dict):
        cfg = copy.deepcopy(DEFAULTS)
        _merge(cfg, user)
        obj = cls(raw=cfg)
        obj.validate()
        return obj

    def validate(self):
        c = self.raw
        if c["scenario"] not in SCENARIOS:
            raise ValidationError(
                f"scenario must be one of {SCENARIOS}, got {c['scenario']!r}")
        if c["shape"]["kind"] not in ("flat", "gaussian-bump", "tabulated"):
            raise ValidationError(f"unknown shape kind {c['shape']['kind']!r}")
        if c["boundary"]["mode"] not in ("planar", "normal", "custom"):
            raise ValidationError(f"unknown boundary mode {c['boundary']['mode']!r}")
        d = c["grid"]["dimension"]
        if d not in (2, 3):
            raise ValidationError(f"dimension must be 2 or 3, got {d}")
        nodes = c["grid"]["nodes"]
        if len(nodes) < d:
            raise ValidationError(f"grid.nodes needs {d} entries, got {len(nodes)}")
        # constructing the params performs the physical validation
        self.params()

    def params(self) -> PhysicalParams:
        return PhysicalParams(**self.raw["physical"])

    def shape(self) -> BoundaryShape:
        c = self.raw["shape"]
        d = self.raw["grid"]["dimension"]
        cell = tuple(float(v) for v in c["cell"])
        if c["kind"] == "flat":
            return flat_shape(dim=d, extent=cell)
        if c["kind"] == "gaussian-bump":
            return gaussian_bump_shape(dim=d, amplitude=c["amplitude"],
                                       width=c["width"], extent=cell)
        if c["samples"] is None:
            raise ValidationError("tabulated shape requires samples")
        return tabulated_shape(np.asarray(c["samples"], dtype=float), extent=cell)

    def grid(self):
        d = self.raw["grid"]["dimension"]
        nodes = tuple(int(v) for v in self.raw["grid"]["nodes"][:d])
        length = self.raw["grid"]["length"]
        if length is None:
            length = float(np.ceil(16.0 / decay_rate(self.params()))) + 1.0
        return make_grid(self.shape(), nodes, float(length))

    def solver_config(self, beta: float = 0.0) -> SolverConfig:
        s = self.raw["solver"]
        return SolverConfig(dt=s["dt"], t_end=s["t_end"],
                            cfl_safety=s["cfl_safety"],
                            upwind_order=int(s["upwind_order"]),
                            report_interval=s["report_interval"], beta=beta)

    def apply_overrides(self, scenario=None, dim=None, resolution=None,
                        tol=None, out=None, sets=None):
        if scenario is not None:
            self.raw["scenario"] = scenario
        if dim is not None:
            self.raw["grid"]["dimension"] = int(dim)
        if resolution is not None:
            n1 = int(resolution)
            d = self.raw["grid"]["dimension"]
            self.raw["grid"]["nodes"] = [n1] + [max(4, n1 // 2)] * (d - 1)
        if tol is not None:
            self.raw["tolerances"]["steady_tol"] = float(tol)
        if out is not None:
            self.raw["output_dir"] = out
        for key, value in (sets or []):
            _set_path(self.raw, key, value)
        self.validate()

    def resolved(self) -> dict:
        return copy.deepcopy(self.raw)


def _merge(base: dict, extra: dict):
    for key, val in extra.items():
        if key not in base:
            raise ValidationError(f"unknown config key {key!r}")
        if isinstance(base[key], dict) and isinstance(val, dict):
            _merge(base[key], val)
        else:
            base[key] = val


def _set_path(cfg: dict, dotted: str, value: str):
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            raise ValidationError(f"unknown config path {dotted!r}")
        node = node[k]
    leaf = keys[-1]
    if leaf not in node:
        raise ValidationError(f"unknown config path {dotted!r}")
    node[leaf] = json.loads(value) if _looks_jsonish(value) else value


def _looks_jsonish(text: str) -> bool:
    try:
        json.loads(text)
        return True
    except (json.JSONDecodeError, TypeError):
        return False
