"""Versioned on-disk cache of exact absorption laws.

Entries are npz files keyed by a hash of (model key, state, prune budget,
format version); a JSON meta record travels inside each file so listing
and cleaning never have to trust file names.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .dist import LatticeDist

CACHE_VERSION = 1
CACHE_ENV = "ABSORBTIME_CACHE"


def cache_dir(explicit: str | None = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "absorbtime"


def _entry_key(model_key: str, n: int, budget: float) -> str:
    payload = json.dumps({"model": json.loads(model_key), "n": n,
                          "budget": budget, "version": CACHE_VERSION},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:32]


def _entry_path(directory: Path, key: str) -> Path:
    return directory / f"law_{key}.npz"


def store_law(directory: Path, model_key: str, n: int, budget: float,
              law: LatticeDist) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    key = _entry_key(model_key, n, budget)
    meta = {"version": CACHE_VERSION, "model": json.loads(model_key),
            "n": n, "budget": budget, "pruned_mass": law.pruned_mass}
    path = _entry_path(directory, key)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, atoms=law.atoms, masses=law.masses,
             meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8))
    os.replace(tmp, path)
    return path


def load_law(directory: Path, model_key: str, n: int, budget: float) -> LatticeDist | None:
    path = _entry_path(directory, _entry_key(model_key, n, budget))
    if not path.exists():
        return None
    try:
        with np.load(path) as z:
            meta = json.loads(bytes(z["meta"].tobytes()).decode())
            if meta.get("version") != CACHE_VERSION:
                return None
            pruned = float(meta.get("pruned_mass", 0.0))
            return LatticeDist(z["atoms"], z["masses"], pruned,
                               max(budget, pruned, 1e-12))
    except Exception:
        return None


def list_entries(directory: Path) -> list[dict]:
    out = []
    if not directory.exists():
        return out
    for path in sorted(directory.glob("law_*.npz")):
        try:
            with np.load(path) as z:
                meta = json.loads(bytes(z["meta"].tobytes()).decode())
            meta["file"] = path.name
            meta["bytes"] = path.stat().st_size
            out.append(meta)
        except Exception:
            out.append({"file": path.name, "error": "unreadable"})
    return out


def clean(directory: Path) -> int:
    """Remove cache entries of the current format version; foreign files stay."""
    removed = 0
    if not directory.exists():
        return removed
    for path in directory.glob("law_*.npz"):
        try:
            with np.load(path) as z:
                meta = json.loads(bytes(z["meta"].tobytes()).decode())
            if meta.get("version") == CACHE_VERSION:
                path.unlink()
                removed += 1
        except Exception:
            continue
    return removed
