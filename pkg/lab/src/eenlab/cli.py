"""Thin wrapper around the primary `een` command-line tool.

All pipeline artifacts (grids, word maps, images, perturbed maps) are
produced by `een` subprocess calls so their provenance manifests come
from the primary implementation.
"""

from __future__ import annotations

import subprocess
import sys


def een(*args: object, cwd=None) -> subprocess.CompletedProcess:
    res = subprocess.run(
        [sys.executable, "-m", "een.cli", *map(str, args)],
        capture_output=True, text=True, cwd=cwd,
    )
    if res.returncode != 0:
        raise RuntimeError(
            f"een {' '.join(map(str, args))} failed "
            f"(exit {res.returncode}): {res.stderr.strip()}"
        )
    return res
