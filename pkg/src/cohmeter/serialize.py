"""State files, named presets, basis specs and report formatting.

State file schemas (JSON)::

    {"kind": "matrix", "dim": 2, "entries": [[re, im], ...]}   # row-major, dim*dim pairs
    {"kind": "ensemble", "weights": [...], "states": [[amp, ...], ...]}
    {"kind": "preset", "name": "appendix-partial"}

An amplitude is either a real number or an ``[re, im]`` pair.
"""

from __future__ import annotations

import json
import math
import re
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .states import (
    KET_0,
    KET_1,
    KET_PLUS,
    DensityOperator,
    MeasurementBasis,
    from_ensemble,
    make_density,
    maximally_mixed,
    pure,
)

SIG_DIGITS = 12

_MIXED_RE = re.compile(r"maximally-mixed-d(\d+)$")


def preset(name: str) -> DensityOperator:
    if name == "mixed-3-1":
        return from_ensemble([0.75, 0.25], [KET_0, KET_1])
    if name == "appendix-partial":
        return from_ensemble([0.75, 0.25], [KET_PLUS, KET_0])
    if name == "plus":
        return pure(KET_PLUS)
    m = _MIXED_RE.match(name)
    if m and int(m.group(1)) >= 2:
        return maximally_mixed(int(m.group(1)))
    raise ValueError(
        f"unknown preset {name!r} (known: mixed-3-1, appendix-partial, plus, maximally-mixed-d<n>)"
    )


def _amplitude(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def state_from_json(obj: dict) -> DensityOperator:
    if not isinstance(obj, dict):
        raise ValueError("state file must hold a JSON object")
    kind = obj.get("kind")
    if kind == "preset":
        return preset(str(obj["name"]))
    if kind == "matrix":
        dim = int(obj["dim"])
        entries = [_amplitude(x) for x in obj["entries"]]
        if len(entries) != dim * dim:
            raise ValueError(f"matrix state needs {dim * dim} entries, got {len(entries)}")
        return make_density(np.array(entries, dtype=complex).reshape(dim, dim))
    if kind == "ensemble":
        states = [[_amplitude(a) for a in s] for s in obj["states"]]
        return from_ensemble([float(w) for w in obj["weights"]], states)
    raise ValueError(f"unknown state kind {kind!r}")


def state_to_json(rho: DensityOperator) -> dict:
    """Matrix-kind state file; floats keep full precision so parsing is exact."""
    return {
        "kind": "matrix",
        "dim": rho.dim,
        "entries": [[float(z.real), float(z.imag)] for z in rho.matrix.reshape(-1)],
    }


def load_state(spec: str) -> DensityOperator:
    """``preset:NAME`` or the path of a JSON state file."""
    if spec.startswith("preset:"):
        return preset(spec[len("preset:"):])
    return state_from_json(json.loads(Path(spec).read_text()))


NAMED_BASES = {
    "computational": lambda: MeasurementBasis.computational(2),
    "plusminus": lambda: MeasurementBasis.from_vectors(np.array([[1, 1], [1, -1]]) / np.sqrt(2)),
    "circular": lambda: MeasurementBasis.from_vectors(np.array([[1, 1j], [1, -1j]]) / np.sqrt(2)),
}


def basis_from_json(obj) -> MeasurementBasis:
    vectors = obj["vectors"] if isinstance(obj, dict) else obj
    return MeasurementBasis.from_vectors([[_amplitude(a) for a in v] for v in vectors])


def load_basis(spec: str) -> MeasurementBasis:
    """A named qubit basis or the path of a JSON file ``{"vectors": [...]}``."""
    if spec in NAMED_BASES:
        return NAMED_BASES[spec]()
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"unknown basis {spec!r} (named: {', '.join(NAMED_BASES)}, or a JSON file)")
    return basis_from_json(json.loads(path.read_text()))


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x):
        return x
    y = float(f"{x:.{digits}g}")
    return 0.0 if y == 0.0 else y


def rounded(obj):
    """Recursively round floats to 12 significant digits for report output."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_report(obj) -> str:
    return json.dumps(rounded(obj), indent=2) + "\n"


def manifest(command: str, config: dict, seed: int) -> dict:
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "artifact_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
