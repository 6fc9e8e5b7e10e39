"""Resource-identifier coding, interfering sets, and effective activity.

Each collector/beam tuple owns a set of orthogonal uplink resources.  In
single-resource mode a tuple's color *is* its resource id (0 = switched
off); in multiple-resource mode the color is the integer code of a binary
resource-incidence vector, bit ``n-1`` standing for resource ``n``.  A
sensor holding several resources picks one uniformly per transmission, so
its effective activity on any one of them is thinned by the set size.

Resource ids are 1-based (1..R); collector, beam, and sensor indices are
0-based throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .scenario import Scenario

__all__ = [
    "MODES",
    "ResourceAllocation",
    "InterferingSet",
    "color_bound",
    "encode_resources",
    "decode_resources",
    "resource_mask",
    "interfering_set",
    "effective_probability",
    "effective_probabilities",
    "write_allocation_csv",
    "read_allocation_csv",
]

MODES = ("single", "multiple")


def color_bound(mode: str, num_resources: int) -> int:
    """Largest legal color: R in single mode, 2**R - 1 in multiple mode."""
    if mode == "single":
        return num_resources
    if mode == "multiple":
        return (1 << num_resources) - 1
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def encode_resources(bits: Sequence[int]) -> int:
    """Integer code of a resource-incidence vector; bit n-1 <-> resource n.

    ``encode_resources([1, 0, 1, 0, 0, 1]) == 37`` and decodes back to
    resources {1, 3, 6}.
    """
    code = 0
    for n, bit in enumerate(bits, start=1):
        if bit not in (0, 1):
            raise ValueError(f"incidence vector entries must be 0 or 1, got {bit!r}")
        code |= bit << (n - 1)
    return code


def decode_resources(color: int, num_resources: int) -> frozenset[int]:
    """Resource ids whose incidence bit is set in ``color``."""
    color = int(color)
    if not 0 <= color < (1 << num_resources):
        raise ValueError(
            f"color {color} out of range [0, 2^{num_resources})"
        )
    return frozenset(n for n in range(1, num_resources + 1) if color >> (n - 1) & 1)


@dataclass(frozen=True, eq=False)
class ResourceAllocation:
    """Colors of every collector/beam tuple plus their decoded resource sets.

    ``colors`` has shape (K, L); ``resource_sets[k * L + l]`` is the set of
    resource ids held by tuple (k, l).  Color 0 means the tuple is switched
    off (empty set) in both modes.
    """

    mode: str
    colors: np.ndarray
    num_resources: int
    resource_sets: tuple[frozenset[int], ...] = field(init=False, repr=False)
    set_sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.num_resources < 1:
            raise ValueError("num_resources must be >= 1")
        colors = np.asarray(self.colors, dtype=np.int64)
        if colors.ndim != 2:
            raise ValueError(f"colors must be a (K, L) matrix, got shape {colors.shape}")
        bound = color_bound(self.mode, self.num_resources)
        if np.any((colors < 0) | (colors > bound)):
            raise ValueError(f"{self.mode}-mode colors must lie in [0, {bound}]")
        object.__setattr__(self, "colors", colors)
        colors.setflags(write=False)
        if self.mode == "single":
            sets = tuple(
                frozenset((int(c),)) if c else frozenset() for c in colors.flat
            )
        else:
            sets = tuple(decode_resources(int(c), self.num_resources) for c in colors.flat)
        object.__setattr__(self, "resource_sets", sets)
        sizes = np.fromiter((len(s) for s in sets), dtype=np.int64, count=len(sets))
        sizes.setflags(write=False)
        object.__setattr__(self, "set_sizes", sizes)

    @property
    def num_cns(self) -> int:
        return self.colors.shape[0]

    @property
    def num_beams(self) -> int:
        return self.colors.shape[1]

    @property
    def num_tuples(self) -> int:
        return self.colors.size

    def tuple_set(self, cn: int, beam: int) -> frozenset[int]:
        return self.resource_sets[cn * self.num_beams + beam]


@dataclass(frozen=True)
class InterferingSet:
    """Sensors able to collide with one reference sensor on one resource.

    ``intra`` members share the reference sensor's detection tuple; ``inter``
    members sit on other tuples whose resource set also contains the
    resource.  ``probabilities`` maps each member to its effective activity
    on any single resource it holds.
    """

    sensor: int
    resource: int
    intra: tuple[int, ...]
    inter: tuple[int, ...]
    probabilities: Mapping[int, float]

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(sorted((*self.intra, *self.inter)))


def resource_mask(
    alloc: ResourceAllocation, scenario: Scenario, resource: int
) -> np.ndarray:
    """Boolean (M,) mask: does sensor j's detection tuple hold ``resource``?"""
    if not 1 <= resource <= alloc.num_resources:
        raise ValueError(
            f"resource ids run 1..{alloc.num_resources}, got {resource}"
        )
    holds = np.fromiter(
        (resource in s for s in alloc.resource_sets),
        dtype=bool,
        count=alloc.num_tuples,
    )
    return holds[scenario.det_node]


def interfering_set(
    alloc: ResourceAllocation,
    scenario: Scenario,
    sensor_index: int,
    resource: int,
) -> InterferingSet:
    """All sensors that can collide with ``sensor_index`` on ``resource``."""
    node = int(scenario.det_node[sensor_index])
    own = alloc.resource_sets[node]
    if resource not in own:
        raise ValueError(
            f"sensor {sensor_index}'s tuple holds resources "
            f"{sorted(own) or '{}'}, not {resource}"
        )
    mask = resource_mask(alloc, scenario, resource).copy()
    mask[sensor_index] = False
    same_tuple = scenario.det_node == node
    intra = tuple(int(j) for j in np.nonzero(mask & same_tuple)[0])
    inter = tuple(int(j) for j in np.nonzero(mask & ~same_tuple)[0])
    p_eff = effective_probabilities(alloc, scenario)
    probs = {int(j): float(p_eff[j]) for j in np.nonzero(mask)[0]}
    return InterferingSet(sensor_index, resource, intra, inter, probs)


def effective_probabilities(
    alloc: ResourceAllocation, scenario: Scenario
) -> np.ndarray:
    """Per-sensor activity on any one held resource: p_act / |T|, 0 if |T| = 0."""
    sizes = alloc.set_sizes[scenario.det_node]
    out = np.zeros(scenario.num_sensors)
    held = sizes > 0
    out[held] = scenario.activities[held] / sizes[held]
    return out


def effective_probability(
    alloc: ResourceAllocation, scenario: Scenario, sensor_index: int
) -> float:
    """Scalar form of :func:`effective_probabilities` for one sensor."""
    size = int(alloc.set_sizes[scenario.det_node[sensor_index]])
    if size == 0:
        return 0.0
    return float(scenario.activities[sensor_index]) / size


def write_allocation_csv(alloc: ResourceAllocation, path: str | Path) -> None:
    """Dump colors and decoded resource lists, one row per tuple.

    Columns: cn, beam, color, resource_list (semicolon-joined ids).  The
    leading comment line carries mode and shape so the file reads back.
    """
    lines = [
        f"# allocation mode={alloc.mode} num_cns={alloc.num_cns} "
        f"num_beams={alloc.num_beams} num_resources={alloc.num_resources}"
    ]
    lines.append("cn,beam,color,resource_list")
    for k in range(alloc.num_cns):
        for l in range(alloc.num_beams):
            ids = ";".join(map(str, sorted(alloc.tuple_set(k, l))))
            lines.append(f"{k},{l},{alloc.colors[k, l]},{ids}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


_ALLOC_HEADER = re.compile(
    r"# allocation mode=(single|multiple) num_cns=(\d+) "
    r"num_beams=(\d+) num_resources=(\d+)$"
)


def read_allocation_csv(path: str | Path) -> ResourceAllocation:
    """Inverse of :func:`write_allocation_csv`, with consistency checks."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or (match := _ALLOC_HEADER.match(lines[0])) is None:
        raise ValueError(f"{path}: missing allocation comment line")
    mode, num_cns, num_beams, num_resources = (
        match.group(1), int(match.group(2)), int(match.group(3)), int(match.group(4)),
    )
    if len(lines) < 2 or lines[1] != "cn,beam,color,resource_list":
        raise ValueError(f"{path}: unexpected column header")
    colors = np.zeros((num_cns, num_beams), dtype=np.int64)
    listed: dict[int, frozenset[int]] = {}
    for row in lines[2:]:
        if not row:
            continue
        cn, beam, color, ids = row.split(",")
        k, l = int(cn), int(beam)
        colors[k, l] = int(color)
        listed[k * num_beams + l] = frozenset(
            int(t) for t in ids.split(";") if t
        )
    alloc = ResourceAllocation(mode, colors, num_resources)
    for node, ids in listed.items():
        if ids != alloc.resource_sets[node]:
            raise ValueError(
                f"{path}: resource_list for tuple {divmod(node, num_beams)} "
                f"does not match its color"
            )
    return alloc
