"""Problem-file schema: parse and write the JSON documents the CLI consumes.

Document layout::

    {
      "dim": 2,
      "operator": {"kind": "affine", "matrix": [[...], ...], "offset": [...],
                   "L": <optional declared>, "mu": <optional declared>},
      "base_set": {"kind": "box" | "polytope",
                   "bounds": {"lower": [...], "upper": [...]},
                   "halfspaces": [{"normal": [...], "offset": r}, ...]},
      "moving_set": {"kind": "translated-base", "base": <set>,
                     "shift_matrix": [[...], ...], "lipschitz_l": r}
                  | {"kind": "segment-family",
                     "a": {"matrix": [[...]], "offset": [...]},
                     "b": {"matrix": [[...]], "offset": [...]},
                     "lipschitz_l": r},
      "params": {"xi", "alpha", "beta", "tol", "max_iter", "gamma_step",
                 "seed"},          # every entry optional
      "starts": [{"x0": [...], "y0": [...]}, ...]
    }

Any numeric leaf accepts a decimal or a fraction string such as "1/128",
so exact dyadic constants survive the round trip.  Schema violations raise
ProblemFileError with the offending field path in the message.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .baseline_solver import BaselineParams
from .dr_solver import DRParams, Problem, default_params
from .operators import AffineMap
from .sets import Box, ConvexSet, MovingSet, Polytope, SegmentFamily, TranslatedSet


class ProblemFileError(ValueError):
    """A problem document violates the schema; the message names the field."""


def _fail(path: str, msg: str):
    raise ProblemFileError(f"{path}: {msg}")


def _number(v, path: str) -> float:
    if isinstance(v, bool):
        _fail(path, "expected a number")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(Fraction(v))
        except (ValueError, ZeroDivisionError):
            _fail(path, f"not a number or fraction string: {v!r}")
    _fail(path, f"expected a number, got {type(v).__name__}")


def _vector(v, path: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(v, list):
        _fail(path, "expected a list of numbers")
    out = np.array([_number(x, f"{path}[{i}]") for i, x in enumerate(v)])
    if dim is not None and out.shape[0] != dim:
        _fail(path, f"expected {dim} entries, got {out.shape[0]}")
    return out


def _matrix(v, path: str, dim: int) -> np.ndarray:
    if not isinstance(v, list) or len(v) != dim:
        _fail(path, f"expected a {dim}x{dim} matrix")
    return np.stack([_vector(row, f"{path}[{i}]", dim) for i, row in enumerate(v)])


def _require(doc: dict, key: str, path: str):
    if not isinstance(doc, dict) or key not in doc:
        _fail(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def _parse_set(doc, path: str, dim: int) -> ConvexSet:
    kind = _require(doc, "kind", path)
    if kind == "box":
        bounds = _require(doc, "bounds", path)
        return Box(_vector(_require(bounds, "lower", f"{path}.bounds"),
                           f"{path}.bounds.lower", dim),
                   _vector(_require(bounds, "upper", f"{path}.bounds"),
                           f"{path}.bounds.upper", dim))
    if kind == "polytope":
        box = None
        if "bounds" in doc:
            bounds = doc["bounds"]
            box = Box(_vector(_require(bounds, "lower", f"{path}.bounds"),
                              f"{path}.bounds.lower", dim),
                      _vector(_require(bounds, "upper", f"{path}.bounds"),
                              f"{path}.bounds.upper", dim))
        halfspaces = []
        for i, hs in enumerate(doc.get("halfspaces", [])):
            hp = f"{path}.halfspaces[{i}]"
            halfspaces.append((
                _vector(_require(hs, "normal", hp), f"{hp}.normal", dim),
                _number(_require(hs, "offset", hp), f"{hp}.offset"),
            ))
        try:
            return Polytope(box, tuple(halfspaces))
        except ValueError as err:
            _fail(path, str(err))
    _fail(f"{path}.kind", f"unrecognized set kind {kind!r}")


def _parse_moving_set(doc, path: str, dim: int) -> MovingSet:
    kind = _require(doc, "kind", path)
    l = _number(_require(doc, "lipschitz_l", path), f"{path}.lipschitz_l")
    if kind == "translated-base":
        base = _parse_set(_require(doc, "base", path), f"{path}.base", dim)
        shift = _matrix(_require(doc, "shift_matrix", path),
                        f"{path}.shift_matrix", dim)
        try:
            return TranslatedSet(base, shift, l)
        except ValueError as err:
            _fail(path, str(err))
    if kind == "segment-family":
        def endpoint(key):
            ep = _require(doc, key, path)
            return (_matrix(_require(ep, "matrix", f"{path}.{key}"),
                            f"{path}.{key}.matrix", dim),
                    _vector(_require(ep, "offset", f"{path}.{key}"),
                            f"{path}.{key}.offset", dim))
        am, ao = endpoint("a")
        bm, bo = endpoint("b")
        return SegmentFamily(am, ao, bm, bo, l)
    _fail(f"{path}.kind", f"unrecognized moving-set kind {kind!r}")


def _parse_operator(doc, path: str, dim: int) -> AffineMap:
    kind = _require(doc, "kind", path)
    if kind != "affine":
        _fail(f"{path}.kind", f"unrecognized operator kind {kind!r}")
    matrix = _matrix(_require(doc, "matrix", path), f"{path}.matrix", dim)
    offset = (_vector(doc["offset"], f"{path}.offset", dim)
              if "offset" in doc else None)
    T = AffineMap(matrix, offset)
    for key, actual in (("L", T.L), ("mu", T.mu)):
        if key in doc:
            declared = _number(doc[key], f"{path}.{key}")
            if abs(declared - actual) > 1e-9:
                _fail(f"{path}.{key}",
                      f"declared {declared} but the matrix gives {actual:.12g}")
    return T


@dataclass(frozen=True, eq=False)
class ProblemBundle:
    """A parsed problem document: the problem, resolved solver parameters,
    the start list, and the normalized document the hash is taken over."""

    problem: Problem
    dr_params: DRParams
    baseline_params: BaselineParams
    starts: list
    document: dict

    @property
    def problem_hash(self) -> str:
        blob = json.dumps(self.document, sort_keys=True,
                          separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def parse_document(doc: dict) -> ProblemBundle:
    if not isinstance(doc, dict):
        _fail("", "problem document must be a JSON object")
    dim = _require(doc, "dim", "")
    if not isinstance(dim, int) or dim < 1:
        _fail("dim", "must be a positive integer")
    T = _parse_operator(_require(doc, "operator", ""), "operator", dim)
    C = _parse_set(_require(doc, "base_set", ""), "base_set", dim)
    phi = _parse_moving_set(_require(doc, "moving_set", ""), "moving_set", dim)
    try:
        problem = Problem(C=C, phi=phi, T=T, dim=dim)
    except ValueError as err:
        _fail("", str(err))

    pdoc = doc.get("params", {})
    if not isinstance(pdoc, dict):
        _fail("params", "must be an object")
    xi = _number(pdoc["xi"], "params.xi") if "xi" in pdoc else None
    tol = _number(pdoc.get("tol", 1e-8), "params.tol")
    max_iter = int(pdoc.get("max_iter", 100_000))
    base = default_params(problem, xi=xi, tol=tol, max_iter=max_iter)
    alpha = (_number(pdoc["alpha"], "params.alpha") if "alpha" in pdoc
             else base.alpha)
    beta = (_number(pdoc["beta"], "params.beta") if "beta" in pdoc
            else base.beta)
    try:
        dr_params = DRParams(xi=base.xi, alpha=alpha, beta=beta, tol=tol,
                             max_iter=max_iter)
    except ValueError as err:
        _fail("params", str(err))
    gamma = (_number(pdoc["gamma_step"], "params.gamma_step")
             if "gamma_step" in pdoc else None)
    seed = int(pdoc.get("seed", 0))
    baseline_params = BaselineParams(gamma_step=gamma, inner_tol=tol,
                                     outer_tol=tol, max_inner=max_iter,
                                     seed=seed)

    starts = []
    sdoc = _require(doc, "starts", "")
    if not isinstance(sdoc, list) or not sdoc:
        _fail("starts", "must be a non-empty list")
    for i, s in enumerate(sdoc):
        starts.append((
            _vector(_require(s, "x0", f"starts[{i}]"), f"starts[{i}].x0", dim),
            _vector(_require(s, "y0", f"starts[{i}]"), f"starts[{i}].y0", dim),
        ))

    bundle = ProblemBundle(problem=problem, dr_params=dr_params,
                           baseline_params=baseline_params, starts=starts,
                           document={})
    object.__setattr__(bundle, "document", to_document(bundle))
    return bundle


def load_problem(path) -> ProblemBundle:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as err:
        raise ProblemFileError(f"{path}: not valid JSON ({err})") from err
    return parse_document(doc)


def _set_document(s: ConvexSet) -> dict:
    if isinstance(s, Box):
        return {"kind": "box",
                "bounds": {"lower": s.lower.tolist(), "upper": s.upper.tolist()}}
    if isinstance(s, Polytope):
        doc = {"kind": "polytope",
               "halfspaces": [{"normal": n.tolist(), "offset": o}
                              for n, o in s.halfspaces]}
        if s.box is not None:
            doc["bounds"] = {"lower": s.box.lower.tolist(),
                             "upper": s.box.upper.tolist()}
        return doc
    raise ProblemFileError(f"cannot serialize set kind {type(s).__name__}")


def _moving_set_document(phi: MovingSet) -> dict:
    if isinstance(phi, TranslatedSet):
        return {"kind": "translated-base", "base": _set_document(phi.base),
                "shift_matrix": phi.shift.tolist(),
                "lipschitz_l": phi.lipschitz_l}
    if isinstance(phi, SegmentFamily):
        return {"kind": "segment-family",
                "a": {"matrix": phi.a_matrix.tolist(),
                      "offset": phi.a_offset.tolist()},
                "b": {"matrix": phi.b_matrix.tolist(),
                      "offset": phi.b_offset.tolist()},
                "lipschitz_l": phi.lipschitz_l}
    raise ProblemFileError(
        f"cannot serialize moving-set kind {type(phi).__name__}")


def to_document(bundle: ProblemBundle) -> dict:
    """Normalized document for a bundle; parsing it back reproduces the
    bundle exactly (numbers are written as exact floats)."""
    prob = bundle.problem
    p = bundle.dr_params
    bp = bundle.baseline_params
    params = {"xi": p.xi, "alpha": p.alpha, "beta": p.beta, "tol": p.tol,
              "max_iter": p.max_iter, "seed": bp.seed}
    if bp.gamma_step is not None:
        params["gamma_step"] = bp.gamma_step
    return {
        "dim": prob.dim,
        "operator": {"kind": "affine", "matrix": prob.T.matrix.tolist(),
                     "offset": prob.T.offset.tolist()},
        "base_set": _set_document(prob.C),
        "moving_set": _moving_set_document(prob.phi),
        "params": params,
        "starts": [{"x0": x0.tolist(), "y0": y0.tolist()}
                   for x0, y0 in bundle.starts],
    }


def write_problem(path, bundle: ProblemBundle) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_document(bundle), f, indent=2, sort_keys=True)
        f.write("\n")


def bundled_problem_path(name: str = "example2.json") -> Path:
    """Path of a problem file shipped with the package."""
    ref = resources.files("qvikit").joinpath("data", name)
    with resources.as_file(ref) as p:
        return Path(p)
