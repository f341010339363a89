"""JSON formats for systems, measures and matrices.

Matrices are row-major nested lists. A complex entry is ``[re, im]``; a bare
number is shorthand for ``[x, 0]``. Parse failures carry the line and column
of malformed JSON, or the JSON path of the offending value.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ParseError, ValidationError
from .matrixcore import DensityMatrix, validate_density
from .measures import MERGE_TOL, AtomicMeasure
from .qifs import Branch, QifsSystem


@dataclass(frozen=True)
class SystemOptions:
    tol: float | None = None
    max_iter: int | None = None
    merge_tol: float | None = None


@dataclass(frozen=True, eq=False)
class SystemFile:
    """A parsed system file: the system plus solver options and structural claims."""

    system: QifsSystem
    options: SystemOptions = field(default_factory=SystemOptions)
    claims: dict[str, bool] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def loads(text: str | bytes) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"file is not UTF-8 text: {exc.reason}") from exc


def _number(x, path: str) -> complex:
    if isinstance(x, bool):
        raise ParseError("expected a number, got a boolean", path=path)
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(y, (int, float)) and not isinstance(y, bool)
                                                   for y in x):
        return complex(float(x[0]), float(x[1]))
    raise ParseError("expected a number or a [re, im] pair", path=path)


def parse_matrix(obj, path: str = "$", dim: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError("expected a matrix as a non-empty list of rows", path=path)
    n = len(obj)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if len(row) != n:
            raise ParseError(f"row has {len(row)} entries, matrix has {n} rows", path=f"{path}[{i}]")
        for j, x in enumerate(row):
            out[i, j] = _number(x, f"{path}[{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise ParseError("matrix has non-finite entries", path=path)
    if dim is not None and n != dim:
        raise ParseError(f"matrix is {n}x{n}, declared dimension is {dim}", path=path)
    return out


def _entry(z: complex):
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> list:
    a = m.matrix if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
    return [[_entry(z) for z in row] for row in a]


def _real_matrix(obj, path: str) -> np.ndarray:
    m = parse_matrix(obj, path)
    if np.any(m.imag != 0):
        raise ParseError("expected a real matrix", path=path)
    return m.real


def _positive(x, path, kind=float):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or x <= 0:
        raise ParseError("expected a positive number", path=path)
    if kind is int and int(x) != x:
        raise ParseError("expected a positive integer", path=path)
    return kind(x)


def parse_system(obj) -> SystemFile:
    if not isinstance(obj, dict):
        raise ParseError("system file must be a JSON object", path="$")
    dim = obj.get("dimension")
    if dim is not None:
        dim = _positive(dim, "$.dimension", int)
    branches = obj.get("branches")
    if not isinstance(branches, list) or not branches:
        raise ParseError("'branches' must be a non-empty list", path="$.branches")
    parsed = []
    for i, b in enumerate(branches):
        p = f"$.branches[{i}]"
        if not isinstance(b, dict) or "v" not in b:
            raise ParseError("each branch needs a 'v' matrix", path=p)
        unknown = set(b) - {"v", "w", "h"}
        if unknown:
            raise ParseError(f"unknown branch keys {sorted(unknown)}", path=p)
        v = parse_matrix(b["v"], f"{p}.v", dim)
        dim = dim or v.shape[0]
        w = parse_matrix(b["w"], f"{p}.w", dim) if b.get("w") is not None else None
        h = parse_matrix(b["h"], f"{p}.h", dim) if b.get("h") is not None else None
        parsed.append(Branch(v, w, h))
    cw = obj.get("constant_weights")
    if cw is not None:
        if not isinstance(cw, list):
            raise ParseError("'constant_weights' must be a list", path="$.constant_weights")
        cw = tuple(_number(x, f"$.constant_weights[{i}]").real for i, x in enumerate(cw))
    opts = obj.get("options") or {}
    if not isinstance(opts, dict):
        raise ParseError("'options' must be an object", path="$.options")
    options = SystemOptions(
        tol=_positive(opts["tol"], "$.options.tol") if "tol" in opts else None,
        max_iter=_positive(opts["max_iter"], "$.options.max_iter", int) if "max_iter" in opts else None,
        merge_tol=_positive(opts["merge_tol"], "$.options.merge_tol") if "merge_tol" in opts else None)
    claims = obj.get("claims") or {}
    if not isinstance(claims, dict) or not all(isinstance(x, bool) for x in claims.values()):
        raise ParseError("'claims' must map names to booleans", path="$.claims")
    known = {"dimension", "branches", "constant_weights", "options", "claims"}
    extra = {k: v for k, v in obj.items() if k not in known}
    system = QifsSystem(tuple(parsed), constant_weights=cw)
    return SystemFile(system, options, dict(claims), extra)


def system_to_json(sf: SystemFile | QifsSystem) -> dict:
    if isinstance(sf, QifsSystem):
        sf = SystemFile(sf)
    s = sf.system
    out: dict[str, Any] = {"dimension": s.dim, "branches": []}
    for b in s.branches:
        entry = {"v": matrix_to_json(b.v)}
        if b.w is not None:
            entry["w"] = matrix_to_json(b.w)
        if b.h is not None:
            entry["h"] = matrix_to_json(b.h)
        out["branches"].append(entry)
    if s.constant_weights is not None:
        out["constant_weights"] = list(s.constant_weights)
    opts = {k: v for k, v in vars(sf.options).items() if v is not None}
    if opts:
        out["options"] = opts
    if sf.claims:
        out["claims"] = dict(sf.claims)
    out.update(sf.extra)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_system(path: str | Path) -> tuple[SystemFile, bytes]:
    raw = read_bytes(path)
    return parse_system(loads(raw)), raw


def parse_measure(obj, merge_tol: float = MERGE_TOL, tol_psd: float = 1e-9) -> AtomicMeasure:
    if not isinstance(obj, dict) or not isinstance(obj.get("atoms"), list) or not obj["atoms"]:
        raise ParseError("measure file needs a non-empty 'atoms' list", path="$.atoms")
    dim = obj.get("dimension")
    merge_tol = obj.get("merge_tol", merge_tol)
    atoms = []
    for i, a in enumerate(obj["atoms"]):
        p = f"$.atoms[{i}]"
        if not isinstance(a, dict) or "weight" not in a or "state" not in a:
            raise ParseError("each atom needs 'weight' and 'state'", path=p)
        w = _number(a["weight"], f"{p}.weight").real
        m = parse_matrix(a["state"], f"{p}.state", dim)
        try:
            rho = validate_density(m, tol_psd)
        except ValidationError as exc:
            raise ParseError(str(exc), path=f"{p}.state") from exc
        atoms.append((w, rho))
    return AtomicMeasure.from_atoms(atoms, merge_tol)


def measure_to_json(mu: AtomicMeasure) -> dict:
    return {"dimension": mu.states[0].dim, "merge_tol": mu.merge_tol,
            "atoms": [{"weight": w, "state": matrix_to_json(s)} for w, s in mu.atoms]}


def load_measure(path, merge_tol: float = MERGE_TOL) -> tuple[AtomicMeasure, bytes]:
    raw = read_bytes(path)
    return parse_measure(loads(raw), merge_tol), raw


def parse_matrix_file(obj) -> np.ndarray:
    """A bare matrix or ``{"matrix": ...}``."""
    if isinstance(obj, dict):
        if "matrix" not in obj:
            raise ParseError("expected a 'matrix' key", path="$")
        return parse_matrix(obj["matrix"], "$.matrix")
    return parse_matrix(obj, "$")


def load_matrix(path) -> tuple[np.ndarray, bytes]:
    raw = read_bytes(path)
    return parse_matrix_file(loads(raw)), raw


def load_matrix_list(path) -> tuple[list[np.ndarray], bytes]:
    """``{"matrices": [...]}`` or a bare list of matrices."""
    raw = read_bytes(path)
    obj = loads(raw)
    items = obj.get("matrices") if isinstance(obj, dict) else obj
    root = "$.matrices" if isinstance(obj, dict) else "$"
    if not isinstance(items, list) or not items:
        raise ParseError("expected a non-empty list of matrices", path=root)
    return [parse_matrix(m, f"{root}[{i}]") for i, m in enumerate(items)], raw


def parse_classic(obj) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(obj, dict) or "a" not in obj or "q" not in obj:
        raise ParseError("classic file needs matrices 'a' and 'q'", path="$")
    return _real_matrix(obj["a"], "$.a"), _real_matrix(obj["q"], "$.q")


def load_classic(path) -> tuple[np.ndarray, np.ndarray, bytes]:
    raw = read_bytes(path)
    a, q = parse_classic(loads(raw))
    return a, q, raw


def real_matrix_to_json(m) -> list:
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def load_real_matrix(path) -> tuple[np.ndarray, bytes]:
    m, raw = load_matrix(path)
    if np.any(m.imag != 0):
        raise ParseError("expected a real matrix", path="$")
    return m.real, raw

