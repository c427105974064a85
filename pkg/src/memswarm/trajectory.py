"""Time- or ant-indexed records of per-edge state and their CSV form."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np


@dataclass
class Trajectory:
    """Sampled evolution of a per-edge state vector.

    ``index`` holds times (s) or ant counts; ``state`` has one row per sample
    and one column per edge.  Memristive runs also carry per-branch currents
    and conductances; colony runs carry each realization's final pheromone.
    """

    index: np.ndarray
    state: np.ndarray
    index_name: str = "t"
    state_name: str = "x"
    currents: np.ndarray | None = None
    conductances: np.ndarray | None = None
    branch_state: np.ndarray | None = None
    realizations_final: np.ndarray | None = None
    clamp_events: int = 0
    end_branch_state: np.ndarray | None = None
    end_time: float | None = None
    index_is_count: bool = False

    def __len__(self) -> int:
        return len(self.index)

    @property
    def final(self) -> np.ndarray:
        return self.state[-1]

    def header(self) -> list[str]:
        cols = [self.index_name]
        cols += [f"{self.state_name}_e{i}" for i in range(self.state.shape[1])]
        if self.currents is not None:
            cols += [f"I_b{i}" for i in range(self.currents.shape[1])]
        if self.conductances is not None:
            cols += [f"sigma_b{i}" for i in range(self.conductances.shape[1])]
        return cols

    def rows(self):
        blocks = [self.index[:, None], self.state]
        if self.currents is not None:
            blocks.append(self.currents)
        if self.conductances is not None:
            blocks.append(self.conductances)
        table = np.hstack([np.asarray(b, dtype=float) for b in blocks])
        for row in table:
            first = str(int(row[0])) if self.index_is_count else repr(float(row[0]))
            yield [first] + [repr(float(v)) for v in row[1:]]

    def to_csv(self, path: str | os.PathLike | None = None) -> str:
        """Write the CSV to ``path`` (if given) and return it as text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        writer.writerows(self.rows())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text
