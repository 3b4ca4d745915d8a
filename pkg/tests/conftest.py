"""Shared fixtures for the gsrcpd test-suite."""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pytest

from gsrcpd.graphkit import ObservationWindow


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def gaussian_window(rng: np.random.Generator) -> ObservationWindow:
    """A 2n = 12 window of 3-dimensional standard Gaussians."""

    return ObservationWindow(rng.standard_normal((12, 3)))


@pytest.fixture
def shifted_window(rng: np.random.Generator) -> ObservationWindow:
    """First half centred at 0, second half at 6 in every coordinate."""

    before = rng.standard_normal((10, 2))
    after = rng.standard_normal((10, 2)) + 6.0
    return ObservationWindow(np.vstack([before, after]))


@pytest.fixture
def write_csv(tmp_path: Path) -> Callable[[str, Sequence[Sequence[float]]], Path]:
    def _write(name: str, rows: Sequence[Sequence[float]], header: Sequence[str] | None = None) -> Path:
        target = tmp_path / name
        lines = []
        if header:
            lines.append(",".join(header))
        lines.extend(",".join(repr(float(value)) for value in row) for row in rows)
        target.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        return target

    return _write
