"""Instance files, instance generators, and report serialization.

Instances travel in the community STP format: a Graph section with `E u v w`
lines and a Terminals section with `T v` lines, 1-based ids.  Only weights 1
and 2 are meaningful here; weight-2 pairs are simply dropped on read because
the metric already makes every absent pair cost 2.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from stp12.core import InputError, Instance

STP_MAGIC = "33D32945 STP File, STP Format Version 1.0"

GENERATOR_FAMILIES = ("random-gnp", "star-cluster", "comet-chain", "bp-adversarial")

REPORT_SCHEMA_VERSION = 1


class ParseError(InputError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_stp(text: str) -> Instance:
    """Parse an STP document into an Instance (ids mapped to 0-based)."""
    node_count: int | None = None
    edges: list[tuple[int, int]] = []
    terminals: list[int] = []
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("33D32945"):
            continue
        tokens = line.split()
        keyword = tokens[0].upper()
        if keyword == "SECTION":
            if len(tokens) < 2:
                raise ParseError("SECTION needs a name", lineno)
            section = tokens[1].lower()
            continue
        if keyword == "END":
            section = None
            continue
        if keyword == "EOF":
            break
        if section == "graph":
            if keyword == "NODES":
                node_count = _int_field(tokens, 1, lineno, "Nodes")
            elif keyword == "EDGES":
                _int_field(tokens, 1, lineno, "Edges")
            elif keyword == "E":
                if len(tokens) != 4:
                    raise ParseError(f"edge line needs 'E u v w', got {line!r}", lineno)
                u, v, w = (_parse_int(t, lineno) for t in tokens[1:])
                if node_count is None:
                    raise ParseError("edge before Nodes declaration", lineno)
                if not (1 <= u <= node_count and 1 <= v <= node_count):
                    raise ParseError(f"edge endpoint out of range 1..{node_count}", lineno)
                if u == v:
                    raise ParseError("self-loop edge", lineno)
                if w == 1:
                    edges.append((u - 1, v - 1))
                elif w != 2:
                    raise ParseError(
                        f"weight {w} outside the 1/2 metric", lineno
                    )
            else:
                raise ParseError(f"unknown Graph line {line!r}", lineno)
        elif section == "terminals":
            if keyword == "TERMINALS":
                _int_field(tokens, 1, lineno, "Terminals")
            elif keyword == "T":
                t = _int_field(tokens, 1, lineno, "T")
                if node_count is None or not (1 <= t <= node_count):
                    raise ParseError("terminal out of range", lineno)
                terminals.append(t - 1)
            else:
                raise ParseError(f"unknown Terminals line {line!r}", lineno)
        # content of other sections (Comment, ...) is ignored
    if node_count is None:
        raise ParseError("missing SECTION Graph with a Nodes line", 1)
    return Instance.from_edges(node_count, edges, terminals)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected integer, got {token!r}", lineno) from None


def _int_field(tokens: list[str], idx: int, lineno: int, what: str) -> int:
    if len(tokens) <= idx:
        raise ParseError(f"{what} needs a value", lineno)
    return _parse_int(tokens[idx], lineno)


def serialize_stp(instance: Instance, name: str = "instance") -> str:
    """Write an Instance as an STP document (1-based ids, weight-1 edges only)."""
    edges = list(instance.edges())
    lines = [
        STP_MAGIC,
        "",
        "SECTION Comment",
        f'Name    "{name}"',
        "END",
        "",
        "SECTION Graph",
        f"Nodes {instance.node_count}",
        f"Edges {len(edges)}",
    ]
    lines.extend(f"E {u + 1} {v + 1} 1" for u, v in edges)
    lines.append("END")
    lines.append("")
    lines.append("SECTION Terminals")
    lines.append(f"Terminals {len(instance.terminals)}")
    lines.extend(f"T {t + 1}" for t in sorted(instance.terminals))
    lines.append("END")
    lines.append("")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GeneratorSpec:
    """Family name, family-specific parameters, and a 64-bit seed."""

    family: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def instance_id(self) -> str:
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.family}({inner},seed={self.seed})"


def generate(spec: GeneratorSpec) -> Instance:
    """Deterministically build an instance from a GeneratorSpec."""
    if spec.family == "random-gnp":
        return _generate_gnp(spec)
    if spec.family == "star-cluster":
        return _generate_star_cluster(spec)
    if spec.family == "comet-chain":
        return _generate_comet_chain(spec)
    if spec.family == "bp-adversarial":
        return _generate_bp_adversarial(spec)
    raise InputError(f"unknown generator family {spec.family!r}")


def _param(spec: GeneratorSpec, key: str, kind=int, minimum=None):
    if key not in spec.params:
        raise InputError(f"{spec.family} needs parameter {key!r}")
    try:
        value = kind(spec.params[key])
    except (TypeError, ValueError):
        raise InputError(f"parameter {key!r} must be {kind.__name__}") from None
    if minimum is not None and value < minimum:
        raise InputError(f"parameter {key!r} must be >= {minimum}")
    return value


def _generate_gnp(spec: GeneratorSpec) -> Instance:
    n = _param(spec, "n", int, 1)
    r = _param(spec, "r", int, 1)
    p = _param(spec, "p", Fraction, 0)
    if p > 1:
        raise InputError("parameter 'p' must be a density in [0, 1]")
    if r > n:
        raise InputError("parameter 'r' cannot exceed 'n'")
    rng = random.Random(spec.seed)
    threshold = float(p)
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < threshold
    ]
    terminals = rng.sample(range(n), r)
    return Instance.from_edges(n, edges, terminals)


def _generate_star_cluster(spec: GeneratorSpec) -> Instance:
    """m disjoint k-stars; consecutive clusters joined by one terminal edge."""
    k = _param(spec, "k", int, 2)
    m = _param(spec, "m", int, 1)
    edges: list[tuple[int, int]] = []
    terminals: list[int] = []
    for i in range(m):
        center = i * (k + 1)
        leaves = [center + 1 + j for j in range(k)]
        edges.extend((center, leaf) for leaf in leaves)
        terminals.extend(leaves)
        if i:
            previous_last_leaf = (i - 1) * (k + 1) + k
            edges.append((previous_last_leaf, leaves[0]))
    return Instance.from_edges(m * (k + 1), edges, terminals)


def _generate_comet_chain(spec: GeneratorSpec) -> Instance:
    """Gadgets whose optimum is one comet each: a center with b direct
    terminals and a forks carrying two terminals apiece."""
    a = _param(spec, "a", int, 0)
    b = _param(spec, "b", int, 0)
    count = _param(spec, "count", int, 1)
    if 2 * a + b < 1:
        raise InputError("comet-chain needs at least one terminal per gadget")
    gadget_size = 1 + b + 3 * a
    edges: list[tuple[int, int]] = []
    terminals: list[int] = []
    for i in range(count):
        base = i * gadget_size
        center = base
        node = base + 1
        for _ in range(b):
            edges.append((center, node))
            terminals.append(node)
            node += 1
        for _ in range(a):
            fork = node
            edges.append((center, fork))
            edges.append((fork, node + 1))
            edges.append((fork, node + 2))
            terminals.extend((node + 1, node + 2))
            node += 3
    return Instance.from_edges(count * gadget_size, edges, terminals)


def _generate_bp_adversarial(spec: GeneratorSpec) -> Instance:
    """Chain of depth 2-stars: center i carries one terminal pair and is
    linked to center i+1.  The greedy star loop exits immediately (no star
    exceeds s = 2) and must finish every pair with non-edges, while the
    optimum threads the center chain; the cost ratio climbs to 4/3 with
    depth."""
    depth = _param(spec, "depth", int, 1)
    edges: list[tuple[int, int]] = []
    terminals: list[int] = []
    for i in range(depth):
        center = i
        t1 = depth + 2 * i
        t2 = depth + 2 * i + 1
        edges.extend(((center, t1), (center, t2)))
        terminals.extend((t1, t2))
        if i + 1 < depth:
            edges.append((center, i + 1))
    return Instance.from_edges(3 * depth, edges, terminals)


@dataclass(frozen=True)
class RatioReport:
    """Per-instance comparison of algorithm costs against the exact optimum."""

    instance_id: str
    opt_cost: int | None
    algorithm_costs: dict[str, int]
    ratios: dict[str, Fraction]
    skipped: str | None = None
    traces: dict[str, list[str]] = field(default_factory=dict)


def write_report(reports: Iterable[RatioReport]) -> str:
    """Serialize reports as a stable, versioned JSON document."""
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "reports": [
            {
                "instance": r.instance_id,
                "opt_cost": r.opt_cost,
                "algorithm_costs": {k: r.algorithm_costs[k] for k in sorted(r.algorithm_costs)},
                "ratios": {k: _fraction_json(r.ratios[k]) for k in sorted(r.ratios)},
                "skipped": r.skipped,
                "traces": {k: list(r.traces[k]) for k in sorted(r.traces)},
            }
            for r in reports
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _fraction_json(value: Fraction) -> dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}
