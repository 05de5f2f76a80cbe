"""Benchmark runner with an embedded table of known optima."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .model import Instance, generate_instance, load_instance
from .okp import solve_okp
from .opp import Limits


@dataclass(frozen=True)
class Reference:
    """Published figures for one instance; ``optimum`` is ``None`` when open."""

    W: tuple[int, ...]
    types: int
    boxes: int
    optimum: int | None
    opt_boxes: int | None = None
    okp_nodes: int | None = None
    opp_calls: int | None = None
    opp_nodes: int | None = None
    bounds: tuple[int, int] | None = None


def _r(W, types, boxes, okp, calls, nodes, opt_boxes, opt):
    return Reference(W, types, boxes, opt, opt_boxes, okp, calls, nodes)


REFERENCE: dict[str, Reference] = {
    "beasley1": _r((10, 10), 5, 10, 19, 1, 1, 5, 164),
    "beasley2": _r((10, 10), 7, 17, 5, 0, 0, 5, 230),
    "beasley3": _r((10, 10), 10, 21, 25, 6, 36, 7, 247),
    "beasley4": _r((15, 10), 5, 7, 1, 0, 0, 6, 268),
    "beasley5": _r((15, 10), 7, 14, 1, 0, 0, 6, 358),
    "beasley6": _r((15, 10), 10, 15, 15, 5, 5, 7, 289),
    "beasley7": _r((20, 20), 5, 8, 0, 0, 0, 8, 430),
    "beasley8": _r((20, 20), 7, 13, 53, 23, 301, 8, 834),
    "beasley9": _r((20, 20), 10, 18, 3, 0, 0, 11, 924),
    "beasley10": _r((30, 30), 5, 13, 1, 0, 0, 6, 1452),
    "beasley11": _r((30, 30), 7, 15, 36, 10, 16, 9, 1688),
    "beasley12": _r((30, 30), 10, 22, 48, 14, 105, 9, 1865),
    "hadchr3": _r((30, 30), 7, 7, 1, 0, 0, 5, 1178),
    "hadchr7": _r((30, 30), 10, 22, 48, 14, 105, 9, 1865),
    "hadchr8": _r((40, 40), 10, 10, 7, 0, 0, 6, 2517),
    "hadchr11": _r((30, 30), 15, 15, 30, 1, 1, 5, 1270),
    "hadchr12": _r((40, 40), 15, 15, 5, 0, 0, 7, 2949),
    "wang20": _r((70, 40), 20, 42, 794, 176, 1003, 8, 2726),
    "chrwhi62": _r((40, 70), 20, 62, 356, 102, 7991, 10, 1860),
    "3": _r((40, 70), 20, 62, 356, 102, 7991, 10, 1860),
    "3s": _r((40, 70), 20, 62, 757, 166, 3050, 8, 2726),
    "A1": _r((50, 60), 20, 62, 935, 254, 19283, 11, 2020),
    "A1s": _r((50, 60), 20, 62, 4291, 504, 8156, 7, 2956),
    "A2": _r((60, 60), 20, 53, 267, 70, 35747, 11, 2615),
    "A2s": _r((60, 60), 20, 53, 8598, 2365, 143002, 8, 3535),
    "CHL2": _r((62, 55), 10, 19, 688, 317, 225011, 9, 2326),
    "CHL2s": _r((62, 55), 10, 19, 1419, 557, 158450, 10, 3336),
    "CHL3": _r((157, 121), 15, 35, 0, 0, 0, 35, 5283),
    "CHL3s": _r((157, 121), 15, 35, 0, 0, 0, 35, 7402),
    "CHL4": _r((207, 231), 15, 27, 0, 0, 0, 27, 8998),
    "CHL4s": _r((207, 231), 15, 27, 0, 0, 0, 27, 13932),
    "CHL5": _r((30, 20), 10, 18, 363, 194, 57115, 11, 589),
    "cgcut1": _r((15, 10), 7, 16, 14, 1, 1, 8, 244),
    "cgcut2": _r((40, 70), 10, 23, None, None, None, 12, 2892),
    "cgcut3": _r((40, 70), 20, 62, 356, 102, 7991, 10, 1860),
    "gcut1": _r((250, 250), 10, 10, 33, 0, 0, 3, 48368),
    "gcut2": _r((250, 250), 20, 20, 519, 51, 78, 6, 59798),
    "gcut3": _r((250, 250), 30, 30, 2234, 235, 742, 6, 61275),
    "gcut4": _r((250, 250), 50, 50, 72159, 18316, 145057, 4, 61380),
    "gcut5": _r((500, 500), 10, 10, 52, 13, 13, 5, 195582),
    "gcut6": _r((500, 500), 20, 20, 278, 22, 22, 4, 236305),
    "gcut7": _r((500, 500), 30, 30, 852, 124, 152, 4, 240143),
    "gcut8": _r((500, 500), 50, 50, 55485, 9037, 15970, 4, 245758),
    "gcut9": _r((1000, 1000), 10, 10, 12, 2, 8, 5, 939600),
    "gcut10": _r((1000, 1000), 20, 20, 335, 31, 40, 5, 937349),
    "gcut11": _r((1000, 1000), 30, 30, 1616, 212, 463, 6, 969709),
    "gcut12": _r((1000, 1000), 50, 50, 8178, 593, 1236, 5, 979521),
    "gcut13": Reference((3000, 3000), 32, 32, None, bounds=(8622498, 9000000)),
    "okp1": _r((100, 100), 15, 50, 3244, 661, 35523, 11, 27718),
    "okp2": _r((100, 100), 30, 30, 23626, 7310, 8721, 11, 22502),
    "okp3": _r((100, 100), 30, 30, 8233, 816, 921, 11, 24019),
    "okp4": _r((100, 100), 33, 61, 1458, 15, 50, 10, 32893),
    "okp5": _r((100, 100), 29, 97, 5733, 643, 13600, 8, 27923),
}

SUITES: dict[str, list[str]] = {
    "paper-small": [f"beasley{k}" for k in range(1, 13)] + ["cgcut1", "cgcut3", "wang20", "chrwhi62"],
    "paper-medium": [f"okp{k}" for k in range(1, 6)] + [f"gcut{k}" for k in range(1, 13)],
    "empty": [],
}

COLUMNS = ("instance", "expected", "found", "status", "match", "boxes", "okp_nodes", "opp_calls", "opp_nodes",
           "seconds")


@dataclass
class BenchRow:
    instance: str
    expected: int | None
    found: int | None
    status: str  # optimal | bounds-only | unavailable
    match: str  # yes | no | - (nothing to compare)
    boxes: int | None = None
    okp_nodes: int | None = None
    opp_calls: int | None = None
    opp_nodes: int | None = None
    seconds: float | None = None

    def as_dict(self, times: bool = True) -> dict:
        out = asdict(self)
        if not times:
            out.pop("seconds")
        return out


def data_dirs(extra: Sequence[str | os.PathLike] = ()) -> list[Path]:
    """Search path for instance files: explicit dirs, ``$ORTHOPACK_DATA``, then bundled fixtures."""
    dirs = [Path(p) for p in extra]
    env = os.environ.get("ORTHOPACK_DATA")
    if env:
        dirs.extend(Path(p) for p in env.split(os.pathsep) if p)
    dirs.append(Path(str(resources.files("orthopack") / "data")))
    return dirs


def find_instance(name: str, dirs: Iterable[Path]) -> Instance | None:
    for d in dirs:
        path = d / f"{name}.txt"
        if path.is_file():
            return load_instance(path)
    return None


def run_instance(name: str, instance: Instance | None, seconds: float | None, seed: int = 0,
                 nodes: int | None = None) -> BenchRow:
    ref = REFERENCE.get(name)
    expected = ref.optimum if ref else None
    if instance is None:
        return BenchRow(name, expected, None, "unavailable", "-")
    res = solve_okp(instance, Limits(nodes=nodes, seconds=seconds), seed=seed)
    if expected is None or not res.optimal:
        match = "-"
    else:
        match = "yes" if res.value == expected else "no"
    return BenchRow(name, expected, res.value, res.status, match, len(res.subset), res.stats.okp_nodes,
                    res.stats.opp_calls, res.stats.opp_nodes, round(res.seconds, 3))


def _job(args):
    return run_instance(*args)


def generated_instances(dimension: int = 3, instance_type: str = "I", m: int = 20, nu: int = 1,
                        seeds: Sequence[int] = range(1, 11)) -> list[tuple[str, Instance]]:
    return [(f"gen-{dimension}d-{instance_type}-m{m}-nu{nu}-s{s}", generate_instance(dimension, instance_type, m, nu, s))
            for s in seeds]


def run_suite(suite: str, seconds: float | None = 900.0, seed: int = 0, nodes: int | None = None,
              dirs: Sequence[str | os.PathLike] = (), jobs: int = 1, generated: dict | None = None) -> list[BenchRow]:
    if suite == "generated":
        named = generated_instances(**(generated or {}))
    elif suite in SUITES:
        search = data_dirs(dirs)
        named = [(name, find_instance(name, search)) for name in SUITES[suite]]
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(sorted(SUITES) + ['generated'])}")
    work = [(name, inst, seconds, seed, nodes) for name, inst in named]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_job, work))
    return [_job(w) for w in work]


def format_table(rows: Sequence[BenchRow], times: bool = True) -> str:
    cols = [c for c in COLUMNS if times or c != "seconds"]
    cells = [[("" if (v := r.as_dict()[c]) is None else str(v)) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"
