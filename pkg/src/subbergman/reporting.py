"""JSON encoding for reports: complex numbers become ``{"re": .., "im": ..}``."""

from __future__ import annotations

import dataclasses
import enum
import json
import math

import numpy as np


def cplx(z) -> dict:
    z = complex(z)
    return {"re": _real(z.real), "im": _real(z.imag)}


def _real(x):
    x = float(x)
    return x if math.isfinite(x) else None


def to_jsonable(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return cplx(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, **kw) -> str:
    return json.dumps(to_jsonable(obj), allow_nan=False, sort_keys=True, ensure_ascii=False, **kw)


def parse_complex(v) -> complex:
    """Accept ``{"re", "im"}``, ``[re, im]``, a number, or a string ``"re,im"`` / ``"1+2j"``."""
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex pair must have two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        s = v.strip()
        if "," in s:
            re, im = s.split(",", 1)
            return complex(float(re), float(im))
        return complex(s.replace(" ", "").replace("i", "j"))
    if isinstance(v, (int, float, complex)):
        return complex(v)
    raise ValueError(f"cannot parse complex number from {v!r}")
