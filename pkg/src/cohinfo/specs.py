"""MatrixFile JSON I/O and the textual state/channel spec grammar.

A MatrixFile is ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` with
entries in row-major order.

Channel specs::

    identity:<d>  dephasing:<p>  bitflip:<p>  depolarizing:<p>
    amplitude-damping:<gamma>  unitary:@<file>  kraus:@<file>

State specs::

    maxmixed:<d>  pure:@<file>  density:@<file>  codespace:@<file>

``kraus:`` and ``codespace:`` files hold either a JSON array of MatrixFile
objects (one per operator / vector) or, for ``codespace:``, a single
MatrixFile whose columns are the code vectors.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import channels
from .channels import KrausChannel
from .errors import CohinfoError
from .states import DensityOperator, PureState, code_state


class SpecError(CohinfoError, ValueError):
    """A spec string or input file could not be parsed."""


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    rows, cols = a.shape
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed matrix object: {exc}") from None
    if len(data) != rows * cols:
        raise SpecError(f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    try:
        vals = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise SpecError(f"matrix entries must be [re, im] pairs: {exc}") from None
    if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in vals):
        raise SpecError("matrix has non-finite entries")
    return np.array(vals, dtype=complex).reshape(rows, cols)


def write_matrix(path, m) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(m)), encoding="utf-8")


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(_load_json(path))


def write_matrices(path, mats) -> None:
    Path(path).write_text(json.dumps([matrix_to_json(m) for m in mats]), encoding="utf-8")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc}") from None


def _split_spec(spec: str) -> tuple[str, str]:
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise SpecError(f"bad spec {spec!r}: expected <kind>:<argument>")
    return kind.strip().lower(), arg.strip()


def _file_arg(spec: str, arg: str) -> str:
    if not arg.startswith("@") or len(arg) < 2:
        raise SpecError(f"bad spec {spec!r}: expected @<file>")
    return arg[1:]


def _number(spec: str, arg: str) -> float:
    try:
        return float(arg)
    except ValueError:
        raise SpecError(f"bad spec {spec!r}: {arg!r} is not a number") from None


def _count(spec: str, arg: str) -> int:
    try:
        n = int(arg)
    except ValueError:
        raise SpecError(f"bad spec {spec!r}: {arg!r} is not an integer") from None
    if n < 1:
        raise SpecError(f"bad spec {spec!r}: dimension must be >= 1")
    return n


_PARAMETRIC = {
    "dephasing": channels.dephasing,
    "bitflip": channels.bit_flip,
    "depolarizing": channels.depolarizing,
    "amplitude-damping": channels.amplitude_damping,
}


def parse_channel(spec: str) -> KrausChannel:
    kind, arg = _split_spec(spec)
    try:
        if kind == "identity":
            return channels.identity(_count(spec, arg))
        if kind in _PARAMETRIC:
            return _PARAMETRIC[kind](_number(spec, arg))
        if kind == "unitary":
            return channels.unitary(read_matrix(_file_arg(spec, arg)))
        if kind == "kraus":
            obj = _load_json(_file_arg(spec, arg))
            mats = obj if isinstance(obj, list) else [obj]
            return KrausChannel([matrix_from_json(m) for m in mats])
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(f"bad spec {spec!r}: {exc}") from None
    raise SpecError(f"bad spec {spec!r}: unknown channel kind {kind!r}")


def parse_state(spec: str) -> DensityOperator:
    kind, arg = _split_spec(spec)
    try:
        if kind == "maxmixed":
            return DensityOperator.maximally_mixed(_count(spec, arg))
        if kind == "pure":
            return PureState(read_matrix(_file_arg(spec, arg)).reshape(-1)).density()
        if kind == "density":
            return DensityOperator(read_matrix(_file_arg(spec, arg)))
        if kind == "codespace":
            obj = _load_json(_file_arg(spec, arg))
            if isinstance(obj, list):
                return code_state([matrix_from_json(v).reshape(-1) for v in obj])
            return code_state(matrix_from_json(obj))
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(f"bad spec {spec!r}: {exc}") from None
    raise SpecError(f"bad spec {spec!r}: unknown state kind {kind!r}")
