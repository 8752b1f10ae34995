"""Problem instances: trajectory layouts plus communication ranges."""

from __future__ import annotations

from dataclasses import dataclass, field

from .commgraph import CommGraph, build_circle_graph, build_path_graph
from .geometry import Circle, ClosedPath


@dataclass
class Instance:
    mode: str                       # "circle" | "path"
    circles: list[Circle] | None = None
    paths: list[ClosedPath] | None = None
    comm_range: float | None = None        # circle mode: shared normalized range
    ranges: list[float] | None = None      # path mode: per-trajectory range
    label: str = ""
    meta: dict = field(default_factory=dict)  # period, white agents, dfs root, ...

    @property
    def n(self) -> int:
        return len(self.circles) if self.mode == "circle" else len(self.paths)

    def graph(self) -> CommGraph:
        if self.mode == "circle":
            return build_circle_graph(self.circles, self.comm_range)
        return build_path_graph(self.paths, self.ranges)
