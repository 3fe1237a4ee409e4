"""Run configuration: a JSON document describing a family, an instance and checks.

Complex numbers are written as ``[re, im]`` pairs (a bare real is accepted).
A minimal configuration::

    {
      "family": {"tag": "EllipticK3", "f": [], "g": [[1, 0], 0, 0, 0, 0, 0,
                                                0, 0, 0, 0, 0, 0, [1, 0]]},
      "instance": {"seed": 42},
      "checks": ["canonical_residual", "involutivity"]
    }

Families given only by ``tag`` are drawn at random from the instance seed.
Errors are reported as :class:`~hyperint.errors.ConfigError` with the JSON
line/column or the dotted path of the offending field.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .instances import FAMILY_TAGS, Instance, random_instance
from .poly import BiPoly, Poly
from .riemann import QuadratureSettings
from .surface import (DoubleCoverK3, EllipticK3, NeumannRational, RationalElliptic,
                      SeibergWitten, SurfaceFamily, cut_curve, lift_points)

__all__ = ["RunConfig", "load_config", "parse_config", "DEFAULT_THRESHOLDS",
           "DEFAULT_CHECKS", "CHECK_NAMES"]

DEFAULT_THRESHOLDS = {
    "canonical_residual": 1e-6,
    "involutivity": 1e-9,
    "dpsi_dx": 1e-6,
    "dpsi_symmetry": 1e-6,
    "dpsi_du_fd": 1e-6,
    "cubic_condition": 1e-5,
    "flow_linearization": 1e-6,
    "flow_conservation": 1e-8,
    "monodromy": 1e-12,
    "path_independence": 1e-9,
    "holomorphy_at_infinity": 1e-8,
    "roundtrip": 1e-10,
    "permutation_invariance": 1e-10,
    "surface_residual": 1e-10,
    "constraints": 1e-9,
    "uhlenbeck_conservation": 1e-9,
    "energy_conservation": 1e-9,
    "h_identity": 1e-12,
    "two_route_u": 1e-9,
    "interlacing": 0.0,
    "linearization_fit": 1e-6,
    "linearization_slopes": 1e-5,
}

DEFAULT_CHECKS = ["canonical_residual", "involutivity", "dpsi_dx", "dpsi_symmetry",
                  "dpsi_du_fd", "cubic_condition", "flow_linearization",
                  "flow_conservation", "monodromy", "roundtrip"]

CHECK_NAMES = ["canonical_residual", "involutivity", "dpsi_dx", "dpsi_symmetry",
               "dpsi_du_fd", "cubic_condition", "flow_linearization",
               "flow_conservation", "monodromy", "path_independence",
               "holomorphy_at_infinity", "roundtrip", "permutation_invariance",
               "surface_residual"]


def _cplx(v, where: str) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {v!r}")


def _cplx_list(v, where: str) -> np.ndarray:
    if not isinstance(v, list):
        raise ConfigError(f"{where}: expected a list")
    return np.array([_cplx(t, f"{where}[{i}]") for i, t in enumerate(v)], dtype=complex)


def _real_list(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        raise ConfigError(f"{where}: expected a list of reals")
    return np.array(v, dtype=float)


def _number(d: dict, key: str, where: str, default=None, positive=False) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}.{key}: missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where}.{key}: must be positive")
    return float(v)


def _family_from_spec(spec: dict, where: str = "family") -> SurfaceFamily | None:
    """Family from explicit coefficients, or None if only the tag is given."""
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected an object")
    tag = spec.get("tag")
    if tag not in FAMILY_TAGS:
        raise ConfigError(f"{where}.tag: unknown family {tag!r} (known: {', '.join(FAMILY_TAGS)})")
    keys = set(spec) - {"tag"}
    try:
        if tag in ("EllipticK3", "RationalElliptic"):
            if not keys:
                return None
            f = Poly(_cplx_list(spec.get("f", []), f"{where}.f"))
            g = Poly(_cplx_list(spec.get("g", []), f"{where}.g"))
            lim_f, lim_g = (8, 12) if tag == "EllipticK3" else (4, 6)
            if f.degree > lim_f:
                raise ConfigError(f"{where}.f: degree {f.degree} exceeds {lim_f} for {tag}")
            if g.degree > lim_g:
                raise ConfigError(f"{where}.g: degree {g.degree} exceeds {lim_g} for {tag}")
            if tag == "EllipticK3":
                return EllipticK3(f, g)
            if "c" not in spec:
                raise ConfigError(f"{where}.c: missing (the pinned x^2 coefficient)")
            return RationalElliptic(f, g, _cplx(spec["c"], f"{where}.c"))
        if tag == "DoubleCoverK3":
            if not keys:
                return None
            rows = spec.get("F2")
            if not isinstance(rows, list) or not rows:
                raise ConfigError(f"{where}.F2: expected a nested list of coefficients")
            C = [_cplx_list(r, f"{where}.F2[{i}]") for i, r in enumerate(rows)]
            width = max(len(r) for r in C)
            M = np.zeros((len(C), width), dtype=complex)
            for i, r in enumerate(C):
                M[i, : len(r)] = r
            F2 = BiPoly(M)
            if F2.total_degree > 6:
                raise ConfigError(f"{where}.F2: total degree {F2.total_degree} exceeds 6")
            return DoubleCoverK3(F2)
        if tag == "NeumannRational":
            if "c" not in spec:
                return None
            return NeumannRational(_real_list(spec["c"], f"{where}.c"),
                                   _number(spec, "r", where, 1.0, positive=True))
        if tag == "SeibergWitten":
            if "Lambda" not in spec:
                return None
            Nc = spec.get("Nc")
            if not isinstance(Nc, int) or isinstance(Nc, bool):
                raise ConfigError(f"{where}.Nc: expected an integer")
            masses = _cplx_list(spec.get("masses", []), f"{where}.masses")
            return SeibergWitten(Nc, _cplx(spec["Lambda"], f"{where}.Lambda"), masses)
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from None
    raise ConfigError(f"{where}.tag: unsupported {tag!r}")


@dataclass
class RunConfig:
    """Parsed configuration; ``raw`` keeps the JSON document for worker processes."""

    raw: dict
    tag: str
    family: SurfaceFamily | None
    seed: int | None
    explicit: dict | None
    settings: QuadratureSettings
    fd_step: float
    thresholds: dict
    checks: list
    flow: dict
    neumann: dict | None
    family_kwargs: dict = field(default_factory=dict)

    def instance(self) -> Instance:
        """The instance described by the configuration (deterministic)."""
        if self.explicit is not None:
            fam = self.family
            cut_curve(fam, self.explicit["u"])  # rejects singular or degenerate curves early
            cfg = lift_points(fam, self.explicit["u"], self.explicit["xs"], self.explicit["signs"])
            return Instance(fam, np.asarray(self.explicit["u"], complex), cfg, None)
        return random_instance(self.tag, self.seed, family=self.family, **self.family_kwargs)

    def threshold(self, name: str) -> float:
        return float(self.thresholds.get(name, DEFAULT_THRESHOLDS.get(name, 0.0)))

    def with_overrides(self, seed: int | None = None, tol_scale: float | None = None) -> "RunConfig":
        raw = copy.deepcopy(self.raw)
        if seed is not None:
            raw.setdefault("instance", {})
            raw["instance"] = {"seed": int(seed)}
            if isinstance(raw.get("neumann"), dict):
                raw["neumann"]["seed"] = int(seed)
        if tol_scale is not None:
            if not tol_scale > 0:
                raise ConfigError("--tol-scale must be positive")
            raw.setdefault("tolerances", {})
            raw["tolerances"]["scale"] = float(tol_scale) * float(raw["tolerances"].get("scale", 1.0))
        return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    known = {"family", "instance", "tolerances", "checks", "flow", "neumann", "periods"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"top level: unknown field(s) {', '.join(sorted(extra))}")
    neumann = raw.get("neumann")
    if neumann is not None:
        if not isinstance(neumann, dict):
            raise ConfigError("neumann: expected an object")
        _parse_neumann(neumann)
    fam_spec = raw.get("family")
    if fam_spec is None and neumann is not None:
        fam_spec = {"tag": "NeumannRational", "c": neumann.get("c", [1, 2, 3]),
                    "r": neumann.get("r", 1.0)}
    if fam_spec is None:
        raise ConfigError("family: missing")
    family = _family_from_spec(fam_spec)
    tag = fam_spec["tag"]
    kw = {}
    if tag == "SeibergWitten" and family is None:
        for k in ("Nc", "Nf"):
            if k in fam_spec:
                kw[k] = int(fam_spec[k])
    if tag == "NeumannRational" and family is None and "N" in fam_spec:
        kw["N"] = int(fam_spec["N"])

    inst = raw.get("instance", {"seed": 0})
    if not isinstance(inst, dict):
        raise ConfigError("instance: expected an object")
    seed, explicit = None, None
    if "seed" in inst:
        seed = inst["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
            raise ConfigError("instance.seed: expected an integer in [0, 2^64)")
    elif {"u", "xs", "signs"} <= set(inst):
        if family is None:
            raise ConfigError("instance: explicit u/xs/signs need explicit family coefficients")
        u = _cplx_list(inst["u"], "instance.u")
        xs = _cplx_list(inst["xs"], "instance.xs")
        signs = inst["signs"]
        if not isinstance(signs, list) or any(s not in (1, -1) for s in signs):
            raise ConfigError("instance.signs: expected a list of +1/-1")
        g = family.genus
        for name, arr in (("u", u), ("xs", xs), ("signs", signs)):
            if len(arr) != g:
                raise ConfigError(f"instance.{name}: need {g} entries for {tag}, got {len(arr)}")
        explicit = {"u": u, "xs": xs, "signs": np.array(signs)}
    else:
        raise ConfigError("instance: give either seed or u, xs and signs")

    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances: expected an object")
    scale = _number(tol, "scale", "tolerances", 1.0, positive=True)
    settings = QuadratureSettings(
        rel_tol=_number(tol, "rel_tol", "tolerances", 1e-10, positive=True),
        abs_tol=_number(tol, "abs_tol", "tolerances", 1e-12, positive=True)).scaled(scale)
    fd_step = _number(tol, "fd_step", "tolerances", 1e-5, positive=True)
    thresholds = tol.get("thresholds", {})
    if not isinstance(thresholds, dict):
        raise ConfigError("tolerances.thresholds: expected an object")
    for k, v in thresholds.items():
        if k not in DEFAULT_THRESHOLDS:
            raise ConfigError(f"tolerances.thresholds.{k}: unknown check")
        _number(thresholds, k, "tolerances.thresholds")

    checks = raw.get("checks", list(DEFAULT_CHECKS))
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        raise ConfigError("checks: expected a list of check names")
    for i, c in enumerate(checks):
        if c not in CHECK_NAMES:
            raise ConfigError(f"checks[{i}]: unknown check {c!r}")

    flow = raw.get("flow", {})
    if not isinstance(flow, dict):
        raise ConfigError("flow: expected an object")
    if "m" in flow and (not isinstance(flow["m"], int) or isinstance(flow["m"], bool)):
        raise ConfigError("flow.m: expected an integer (1-based flow index)")
    if "T" in flow:
        _number(flow, "T", "flow", positive=True)

    return RunConfig(raw, tag, family, seed, explicit, settings, fd_step,
                     dict(thresholds), list(checks), dict(flow), neumann, kw)


def _parse_neumann(spec: dict) -> None:
    c = _real_list(spec.get("c", [1, 2, 3]), "neumann.c")
    if len(c) < 2 or len(np.unique(c)) != len(c):
        raise ConfigError("neumann.c: need at least two distinct constants")
    _number(spec, "r", "neumann", 1.0, positive=True)
    _number(spec, "T", "neumann", 5.0, positive=True)
    for key in ("q0", "p0"):
        if key in spec and len(_real_list(spec[key], f"neumann.{key}")) != len(c):
            raise ConfigError(f"neumann.{key}: need {len(c)} entries")
    if ("q0" in spec) != ("p0" in spec):
        raise ConfigError("neumann: give both q0 and p0, or neither")


def load_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_config(raw)
