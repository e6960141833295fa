"""Versioned JSON coefficient files.

Numbers are written with 17 significant digits, so a write/read cycle
reproduces every float exactly, and the layout is fixed so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import TaylorCoefficients
from .errors import ValidationError

__all__ = ["FORMAT_VERSION", "CoefficientFile", "FileFormatError", "format_float"]

FORMAT_VERSION = 1


class FileFormatError(ValidationError):
    """Malformed or unsupported coefficient file."""


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def _dump(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_dump(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_dump(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    return json.dumps(str(obj))


@dataclass(frozen=True, eq=False)
class CoefficientFile:
    """Taylor coefficients plus an optional provenance block."""

    coefficients: TaylorCoefficients
    provenance: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @property
    def K(self) -> int:
        return self.coefficients.K

    def to_text(self) -> str:
        c = self.coefficients.c
        lines = ",\n".join(f"    [{format_float(z.real)}, {format_float(z.imag)}]" for z in c)
        head = _dump({"version": self.version, "K": self.K})
        # splice the coefficient list in one pair per line for diffability
        text = head[:-2] + ',\n  "coefficients": [\n' + lines + "\n  ]"
        if self.provenance:
            text += ',\n  "provenance": ' + _dump(self.provenance, 1)
        return text + "\n}\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "CoefficientFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise FileFormatError("top level must be an object")
        version = data.get("version")
        if version != FORMAT_VERSION:
            raise FileFormatError(f"unsupported version {version!r}")
        K = data.get("K")
        coeffs = data.get("coefficients")
        if not isinstance(K, int) or isinstance(K, bool) or K < 1:
            raise FileFormatError("K must be a positive integer")
        if not isinstance(coeffs, list) or len(coeffs) != K + 1:
            raise FileFormatError(f"expected {K + 1} coefficients")
        try:
            arr = np.array([complex(float(re), float(im)) for re, im in coeffs])
        except (TypeError, ValueError) as exc:
            raise FileFormatError("coefficients must be [re, im] number pairs") from exc
        prov = data.get("provenance", {})
        if not isinstance(prov, dict):
            raise FileFormatError("provenance must be an object")
        try:
            tc = TaylorCoefficients(arr)
        except ValidationError as exc:
            raise FileFormatError(str(exc)) from exc
        return cls(tc, prov, version)

    @classmethod
    def read(cls, path) -> "CoefficientFile":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise FileFormatError(f"cannot read {path}: {exc.strerror}") from exc
        return cls.from_text(text)
