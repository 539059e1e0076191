"""Scenario files: versioned JSON, either a generator reference or explicit
per-point trajectory data.

Schema (format_version 1):
    {
      "format_version": 1,
      "label": str, "n": int, "d": int, "T": float,
      "k": float|null, "K": float|null, "morph_mode": "slide"|"rotation",
      "generator": {"name": ..., <params>}          # one of these two
      "points": [ {"kind": ...}, ... ]
    }
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .errors import ParameterError
from .scenarios import GENERATORS, KineticScenario
from .trajectories import ArcSegment, LinearSegment, Trajectory

FORMAT_VERSION = 1

_GENERATOR_PARAMS = {
    "chebyshev": ("s", "n", "T"),
    "rational-bumps": ("s", "n"),
    "circle": ("n", "e_len"),
    "diamond": ("per_side",),
    "split": ("n", "colors"),
}


def _traj_to_dict(traj: Trajectory) -> dict:
    out: dict = {"kind": traj.kind}
    if traj.clamp_unit:
        out["clamp_unit"] = True
    if traj.kind == "polynomial":
        out["coeffs"] = [list(c) for c in traj.coeffs]
    elif traj.kind == "rational":
        out["terms"] = [
            [[list(num), list(den)] for num, den in coord] for coord in traj.terms
        ]
    else:
        segs = []
        for seg in traj.segments:
            if isinstance(seg, LinearSegment):
                segs.append(
                    {
                        "type": "linear",
                        "t0": seg.t0,
                        "t1": seg.t1,
                        "start": list(seg.start),
                        "end": list(seg.end),
                    }
                )
            else:
                segs.append(
                    {
                        "type": "arc",
                        "t0": seg.t0,
                        "t1": seg.t1,
                        "center": list(seg.center),
                        "radius": seg.radius,
                        "angle0": seg.angle0,
                        "angle1": seg.angle1,
                    }
                )
        out["segments"] = segs
    return out


def _traj_from_dict(d: dict, dim: int, horizon: float) -> Trajectory:
    kind = d["kind"]
    clamp = bool(d.get("clamp_unit", False))
    if kind == "polynomial":
        return Trajectory(
            kind="polynomial",
            dim=dim,
            horizon=horizon,
            coeffs=tuple(tuple(float(x) for x in c) for c in d["coeffs"]),
            clamp_unit=clamp,
        )
    if kind == "rational":
        return Trajectory(
            kind="rational",
            dim=dim,
            horizon=horizon,
            terms=tuple(
                tuple(
                    (tuple(float(x) for x in num), tuple(float(x) for x in den))
                    for num, den in coord
                )
                for coord in d["terms"]
            ),
            clamp_unit=clamp,
        )
    if kind == "scripted":
        segs = []
        for s in d["segments"]:
            if s["type"] == "linear":
                segs.append(
                    LinearSegment(
                        float(s["t0"]),
                        float(s["t1"]),
                        tuple(float(x) for x in s["start"]),
                        tuple(float(x) for x in s["end"]),
                    )
                )
            elif s["type"] == "arc":
                segs.append(
                    ArcSegment(
                        float(s["t0"]),
                        float(s["t1"]),
                        tuple(float(x) for x in s["center"]),
                        float(s["radius"]),
                        float(s["angle0"]),
                        float(s["angle1"]),
                    )
                )
            else:
                raise ParameterError(f"unknown segment type {s['type']!r}")
        return Trajectory(
            kind="scripted", dim=dim, horizon=horizon, segments=tuple(segs),
            clamp_unit=clamp,
        )
    raise ParameterError(f"unknown trajectory kind {kind!r}")


def scenario_to_dict(sc: KineticScenario) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "label": sc.label,
        "n": sc.n,
        "d": sc.dim,
        "T": sc.horizon,
        "k": sc.k,
        "K": sc.K,
        "morph_mode": sc.morph_mode,
    }
    gen_name = sc.meta.get("generator")
    if gen_name in _GENERATOR_PARAMS:
        params = {}
        for key in _GENERATOR_PARAMS[gen_name]:
            if key == "n":
                params["n"] = sc.n
            elif key == "T":
                params["T"] = sc.horizon
            elif key == "per_side":
                params["per_side"] = sc.meta["per_side"]
            elif key == "e_len":
                params["e_len"] = sc.meta["e_len"]
            elif key == "colors":
                params["colors"] = list(sc.meta["colors"])
            else:
                params[key] = sc.meta[key]
        out["generator"] = {"name": gen_name, **params}
    else:
        out["points"] = [_traj_to_dict(p) for p in sc.points]
    return out


def build_generator(name: str, **params) -> KineticScenario:
    if name not in GENERATORS:
        raise ParameterError(
            f"unknown generator {name!r}; available: {sorted(GENERATORS)}"
        )
    fn = GENERATORS[name]
    required = {
        "chebyshev": ("s", "n"),
        "rational-bumps": ("s", "n"),
        "circle": ("n",),
        "split": ("n",),
        "diamond": (),
    }[name]
    missing = [key for key in required if params.get(key) is None]
    if missing:
        raise ParameterError(
            f"generator {name!r} needs {', '.join('--' + m for m in missing)}"
        )
    if name == "diamond":
        return fn(points_per_side=int(params.get("per_side", 6)))
    if name == "circle":
        kwargs = {"n": int(params["n"])}
        if params.get("e_len") is not None:
            kwargs["e_len"] = float(params["e_len"])
        return fn(**kwargs)
    if name == "chebyshev":
        kwargs = {"s": int(params["s"]), "n": int(params["n"])}
        if params.get("T") is not None:
            kwargs["T"] = float(params["T"])
        return fn(**kwargs)
    if name == "rational-bumps":
        return fn(s=int(params["s"]), n=int(params["n"]))
    if name == "split":
        return fn(n=int(params["n"]), colors=params.get("colors"))
    raise ParameterError(f"unhandled generator {name!r}")


def scenario_from_dict(d: dict) -> KineticScenario:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ParameterError(f"unsupported format_version {version!r}")
    if "generator" in d:
        gen = dict(d["generator"])
        name = gen.pop("name")
        sc = build_generator(name, **gen)
    elif "points" in d:
        dim = int(d["d"])
        horizon = float(d["T"])
        points = tuple(_traj_from_dict(p, dim, horizon) for p in d["points"])
        sc = KineticScenario(points=points)
        if d.get("n") is not None and int(d["n"]) != sc.n:
            raise ParameterError("point count does not match field n")
    else:
        raise ParameterError("scenario needs either 'generator' or 'points'")
    return dataclasses.replace(
        sc,
        k=d.get("k"),
        K=d.get("K"),
        morph_mode=d.get("morph_mode", sc.morph_mode),
        label=d.get("label", sc.label),
    )


def save_scenario(path, sc: KineticScenario) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True) + "\n")


def load_scenario(path) -> KineticScenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
