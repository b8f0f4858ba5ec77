"""Deterministic output writers and the run manifest.

Given the same inputs and seed, every writer here produces byte-identical
files; wall-clock information is confined to the manifest.
"""
from __future__ import annotations

import hashlib
import json
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    return obj


def write_json(path: Path, payload: dict) -> None:
    path = Path(path)
    path.write_text(json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header: list[str], rows) -> None:
    """Rows of floats/strings; floats rendered with repr for stability."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, (float, np.floating)):
                    cells.append(repr(float(v)))
                elif isinstance(v, (int, np.integer)):
                    cells.append(str(int(v)))
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    path: Path,
    config_path: Path,
    scenario: str,
    seed: int,
    passed: bool,
    outputs: list[str],
    wall_time_s: float,
) -> None:
    payload = {
        "scenario": scenario,
        "config": str(config_path),
        "config_sha256": sha256_file(config_path),
        "seed": seed,
        "pass": passed,
        "outputs": sorted(outputs),
        "wall_time_s": wall_time_s,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "versions": {
            "diracpilot": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    write_json(path, payload)


def pmap(fn, items, workers: int = 1):
    """Order-preserving map with an optional thread pool.

    Results are merged by index, so the output is identical for any worker
    count (numpy kernels release the GIL, which is where the time goes)."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
