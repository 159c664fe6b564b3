"""Pluggable interface to external MILP solvers.

Models are exported as LP files; a backend is any command that accepts
the model path and prints one "name value" pair per line. Values may be
integers, decimals or fractions; parsing is exact.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .milp import MilpModel, emit_lp


def parse_solution_text(text: str) -> dict[str, Fraction]:
    """Parse "name value" lines; blank lines and #-comments are skipped."""
    out: dict[str, Fraction] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'name value', got {line!r}")
        try:
            out[parts[0]] = Fraction(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: bad value {parts[1]!r}") from exc
    return out


@dataclass
class ExternalSolverBackend:
    """Run an external command on an LP file and parse its stdout.

    ``command`` is an argv list; the model path is appended (or replaces a
    "{model}" placeholder).
    """

    command: list[str]
    timeout: float | None = None

    def solve(self, model: MilpModel) -> dict[str, Fraction]:
        with tempfile.TemporaryDirectory(prefix="picktour_") as tmp:
            path = Path(tmp) / "model.lp"
            path.write_text(emit_lp(model), encoding="utf-8")
            argv = list(self.command)
            if any("{model}" in a for a in argv):
                argv = [a.replace("{model}", str(path)) for a in argv]
            else:
                argv.append(str(path))
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=self.timeout, check=False
            )
            if proc.returncode != 0:
                raise RuntimeError(
                    f"solver command failed ({proc.returncode}): {proc.stderr.strip()}"
                )
            return parse_solution_text(proc.stdout)
