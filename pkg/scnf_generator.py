#!/usr/bin/env python3
"""
SCNF/CCNF generator
Simplex gadgets S3/S4 over three variables and CCNF instances that place
one gadget on every node of a cubic graph, edges being shared variables
"""

import argparse
import json
import logging
import math
import random
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from cnf_formula import Clause, Formula, Literal, emit_dimacs

logger = logging.getLogger(__name__)

NAMED_GRAPHS = ("k4", "petersen", "mcgee")
DEFAULT_GRAPH_ATTEMPTS = 2000
DEFAULT_C0 = Fraction(2)
ROLE_NAMES = ("P", "Q", "R")
ALL_POSITIVE = (True, True, True)

Roles = Tuple[bool, bool, bool]


class CcnfError(ValueError):
    """Graph or CCNF spec cannot produce a valid instance"""


class GadgetKind(str, Enum):
    S3 = "S3"
    S4 = "S4"


def _role_literals(variables: Sequence[int], roles: Roles) -> Tuple[Literal, Literal, Literal]:
    if len(variables) != 3 or len(set(variables)) != 3:
        raise ValueError(f"A simplex gadget needs 3 distinct variables, got {list(variables)}")
    if len(roles) != 3:
        raise ValueError(f"A simplex gadget needs 3 role polarities, got {list(roles)}")
    p, q, r = (Literal(v, polarity) for v, polarity in zip(variables, roles))
    return p, q, r


def s3cnf(variables: Sequence[int], roles: Roles = ALL_POSITIVE) -> Formula:
    """
    3-simplex gadget: exactly one of P, Q, R holds

    Args:
        variables: Three distinct variables filling roles P, Q, R
        roles: Polarity of each role; False puts the negated variable in the role

    Returns:
        (-P -Q) (-Q -R) (-P -R) (P Q R)
    """
    p, q, r = _role_literals(variables, roles)
    clauses = (
        Clause((-p, -q)),
        Clause((-q, -r)),
        Clause((-p, -r)),
        Clause((p, q, r)),
    )
    return Formula(clauses, max(variables))


def s4cnf(variables: Sequence[int], roles: Roles = ALL_POSITIVE) -> Formula:
    """
    4-simplex gadget: an even number of P, Q, R is false

    Returns:
        (-P -Q R) (P -Q -R) (-P Q -R) (P Q R)
    """
    p, q, r = _role_literals(variables, roles)
    clauses = (
        Clause((-p, -q, r)),
        Clause((p, -q, -r)),
        Clause((-p, q, -r)),
        Clause((p, q, r)),
    )
    return Formula(clauses, max(variables))


GADGET_BUILDERS = {GadgetKind.S3: s3cnf, GadgetKind.S4: s4cnf}


@dataclass(frozen=True)
class RandomCubicSpec:
    nodes: int
    min_girth: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.nodes < 4 or self.nodes % 2:
            raise CcnfError(f"A cubic graph needs an even node count >= 4, got {self.nodes}")

    @property
    def name(self) -> str:
        return f"random-n{self.nodes}-g{self.min_girth}-s{self.seed}"

    def to_json(self) -> Dict[str, int]:
        return {"nodes": self.nodes, "min_girth": self.min_girth, "seed": self.seed}


@dataclass(frozen=True)
class GadgetEdge:
    index: int
    endpoints: Tuple[int, int]

    @property
    def variable(self) -> int:
        return self.index + 1


@dataclass(frozen=True)
class GadgetNode:
    """A gadget site; roles are the edge indices filling P, Q, R"""

    index: int
    roles: Tuple[int, int, int]
    kind: Optional[GadgetKind] = None
    polarities: Roles = ALL_POSITIVE


@dataclass(frozen=True)
class GadgetGraph:
    """
    Cubic graph with gadget sites on nodes and variables on edges

    Nodes are 0..n-1; edges are sorted (low, high) pairs and edge i carries
    variable i+1. Each node fills roles P, Q, R with its incident edges in
    ascending neighbor order.
    """

    name: str
    nodes: Tuple[GadgetNode, ...]
    edges: Tuple[GadgetEdge, ...]
    girth: Optional[int]
    graph: nx.Graph = field(compare=False, repr=False)

    degree = 3

    @classmethod
    def from_networkx(cls, name: str, graph: nx.Graph) -> "GadgetGraph":
        bad = [node for node, degree in graph.degree() if degree != 3]
        if bad:
            raise CcnfError(f"Graph {name} is not cubic: nodes {bad[:5]} have degree != 3")

        graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
        edges = tuple(
            GadgetEdge(index, pair)
            for index, pair in enumerate(sorted((min(u, v), max(u, v)) for u, v in graph.edges()))
        )
        edge_index = {edge.endpoints: edge.index for edge in edges}
        nodes = tuple(
            GadgetNode(node, tuple(edge_index[(min(node, n), max(node, n))]
                                   for n in sorted(graph.neighbors(node))))
            for node in sorted(graph.nodes())
        )
        return cls(name, nodes, edges, girth(graph), graph)

    def with_assignment(self, kinds: Sequence[GadgetKind],
                        polarities: Optional[Sequence[Roles]] = None) -> "GadgetGraph":
        if len(kinds) != len(self.nodes):
            raise CcnfError(f"{len(kinds)} gadget kinds for {len(self.nodes)} nodes")
        polarities = polarities or [ALL_POSITIVE] * len(self.nodes)
        nodes = tuple(
            replace(node, kind=GadgetKind(kind), polarities=tuple(roles))
            for node, kind, roles in zip(self.nodes, kinds, polarities)
        )
        return replace(self, nodes=nodes)

    def node_variables(self, node: GadgetNode) -> Tuple[int, int, int]:
        return tuple(self.edges[edge].variable for edge in node.roles)

    def sidecar(self) -> Dict[str, Any]:
        return {
            "graph": self.name,
            "girth": self.girth,
            "nodes": [
                {
                    "index": node.index,
                    "kind": node.kind.value if node.kind else None,
                    "roles": dict(zip(ROLE_NAMES, self.node_variables(node))),
                    "polarities": dict(zip(ROLE_NAMES, node.polarities)),
                }
                for node in self.nodes
            ],
            "edges": [
                {"variable": edge.variable, "endpoints": list(edge.endpoints)}
                for edge in self.edges
            ],
        }


def girth(graph: Union[GadgetGraph, nx.Graph]) -> Optional[int]:
    """
    Shortest cycle length by breadth-first search from every node

    Returns:
        Girth, or None for an acyclic graph
    """
    if isinstance(graph, GadgetGraph):
        graph = graph.graph

    best: Optional[int] = None
    for source in graph.nodes():
        depth = {source: 0}
        parent = {source: None}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            # any cycle closed from here is at least 2 * depth long
            if best is not None and 2 * depth[node] >= best:
                break
            for neighbor in graph.neighbors(node):
                if neighbor not in depth:
                    depth[neighbor] = depth[node] + 1
                    parent[neighbor] = node
                    queue.append(neighbor)
                elif parent[node] != neighbor:
                    length = depth[node] + depth[neighbor] + 1
                    if best is None or length < best:
                        best = length
    return best


def _named_graph(name: str) -> nx.Graph:
    if name == "k4":
        return nx.complete_graph(4)
    if name == "petersen":
        return nx.petersen_graph()
    if name == "mcgee":
        # (3,7)-cage, 24 nodes
        return nx.LCF_graph(24, [12, 7, -7], 8)
    raise CcnfError(f"Unknown graph {name!r}, expected one of {', '.join(NAMED_GRAPHS)}")


def cubic_graph(source: Union[str, RandomCubicSpec],
                attempts: int = DEFAULT_GRAPH_ATTEMPTS) -> GadgetGraph:
    """
    Build a named cubic graph or rejection-sample a random one

    Random graphs are redrawn from a generator seeded once with spec.seed
    until one is connected with an odd girth >= spec.min_girth.

    Args:
        source: k4, petersen, mcgee or a RandomCubicSpec
        attempts: Draws before giving up on a random spec

    Returns:
        GadgetGraph skeleton with no gadget kinds assigned

    Raises:
        CcnfError: unknown name or girth unreachable within attempts
    """
    if isinstance(source, str):
        return GadgetGraph.from_networkx(source, _named_graph(source))

    rng = random.Random(source.seed)
    for attempt in range(1, attempts + 1):
        candidate = nx.random_regular_graph(3, source.nodes, seed=rng)
        if not nx.is_connected(candidate):
            continue
        candidate_girth = girth(candidate)
        # CCNF instances need an odd girth
        if candidate_girth is not None and candidate_girth >= source.min_girth and candidate_girth % 2 == 1:
            logger.debug(f"Random cubic graph accepted after {attempt} attempts, girth {candidate_girth}")
            return GadgetGraph.from_networkx(source.name, candidate)

    raise CcnfError(f"No connected cubic graph on {source.nodes} nodes with odd girth >= "
                    f"{source.min_girth} in {attempts} attempts")


def parse_kinds(kinds: Union[str, Sequence[str]], node_count: int) -> Tuple[GadgetKind, ...]:
    """all-s3, all-s4 or one S3/S4 entry per node"""
    if isinstance(kinds, str):
        uniform = {"all-s3": GadgetKind.S3, "all-s4": GadgetKind.S4}.get(kinds.lower())
        if uniform is None:
            raise CcnfError(f"Unknown kinds {kinds!r}, expected all-s3, all-s4 or a list")
        return (uniform,) * node_count
    try:
        parsed = tuple(GadgetKind(str(kind).upper()) for kind in kinds)
    except ValueError as e:
        raise CcnfError(f"Invalid gadget kind: {e}")
    if len(parsed) != node_count:
        raise CcnfError(f"{len(parsed)} gadget kinds for {node_count} nodes")
    return parsed


def kinds_label(kinds: Sequence[GadgetKind]) -> str:
    if kinds and all(kind is GadgetKind.S4 for kind in kinds):
        return "all-s4"
    if kinds and all(kind is GadgetKind.S3 for kind in kinds):
        return "all-s3"
    return "mixed"


def random_polarities(graph: GadgetGraph, seed: int) -> Tuple[Roles, ...]:
    rng = random.Random(seed)
    return tuple(tuple(rng.random() < 0.5 for _ in ROLE_NAMES) for _ in graph.nodes)


@dataclass(frozen=True)
class CcnfSpec:
    """k fixes the girth 2k+1; c0 > 1 is the S4 density constant"""

    k: int
    c0: Fraction
    kind_assignment: Tuple[GadgetKind, ...]
    polarity_assignment: Optional[Tuple[Roles, ...]] = None
    # recorded in the instance comment line
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "c0", Fraction(self.c0))
        if self.k < 1:
            raise CcnfError(f"k must be >= 1, got {self.k}")
        if self.c0 <= 1:
            raise CcnfError(f"c0 must be > 1, got {self.c0}")

    @property
    def required_s4(self) -> int:
        return math.ceil(self.k * self.c0)

    def polarities(self, node_count: int) -> Tuple[Roles, ...]:
        return self.polarity_assignment or (ALL_POSITIVE,) * node_count


def assemble_ccnf(graph: GadgetGraph, spec: CcnfSpec) -> Formula:
    """
    Place spec's gadgets on every node of graph

    Returns:
        Formula with 4 clauses per node over one variable per edge

    Raises:
        CcnfError: acyclic graph, even girth, girth != 2k+1 or partial kinds
    """
    if graph.girth is None:
        raise CcnfError(f"Graph {graph.name} is acyclic")
    if graph.girth % 2 == 0:
        raise CcnfError(f"Graph {graph.name} has even girth {graph.girth}; CCNF needs girth 2k+1")
    if graph.girth != 2 * spec.k + 1:
        raise CcnfError(f"Graph {graph.name} has girth {graph.girth}, spec k={spec.k} needs {2 * spec.k + 1}")
    if len(spec.kind_assignment) != len(graph.nodes):
        raise CcnfError(f"{len(spec.kind_assignment)} gadget kinds for {len(graph.nodes)} nodes")

    polarities = spec.polarities(len(graph.nodes))
    clauses: List[Clause] = []
    for node, kind, roles in zip(graph.nodes, spec.kind_assignment, polarities):
        clauses.extend(GADGET_BUILDERS[kind](graph.node_variables(node), roles).clauses)

    comment = (f"ccnf {graph.name} kinds {kinds_label(spec.kind_assignment)} "
               f"girth {graph.girth} k {spec.k} c0 {spec.c0}")
    if spec.seed is not None:
        comment += f" seed {spec.seed}"
    return Formula(tuple(clauses), len(graph.edges), (comment,))


def girth_cycles(graph: nx.Graph, length: int) -> List[Tuple[int, ...]]:
    """Every simple cycle of exactly length, each once, rotated to start at its smallest node"""
    cycles = set()
    for cycle in nx.simple_cycles(graph, length_bound=length):
        if len(cycle) != length:
            continue
        start = cycle.index(min(cycle))
        rotated = cycle[start:] + cycle[:start]
        reverse = [rotated[0]] + rotated[1:][::-1]
        cycles.add(tuple(min(rotated, reverse)))
    return sorted(cycles)


@dataclass(frozen=True)
class CcnfReport:
    """Outcome of the Moore-size and S4-density checks"""

    graph: str
    node_count: int
    edge_count: int
    girth: Optional[int]
    k: int
    c0: Fraction
    moore_bound: int
    moore_deviation: int
    condition_a: bool
    cycle_length: int
    cycles_checked: int
    min_s4_on_cycle: Optional[int]
    required_s4: int
    condition_b: bool
    density_feasible: bool

    @property
    def passed(self) -> bool:
        return self.condition_a and self.condition_b

    def to_json(self) -> Dict[str, Any]:
        return {
            "graph": self.graph,
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "girth": self.girth,
            "k": self.k,
            "c0": str(self.c0),
            "moore_bound": self.moore_bound,
            "moore_deviation": self.moore_deviation,
            "condition_a": self.condition_a,
            "cycle_length": self.cycle_length,
            "cycles_checked": self.cycles_checked,
            "min_s4_on_cycle": self.min_s4_on_cycle,
            "required_s4": self.required_s4,
            "condition_b": self.condition_b,
            "density_feasible": self.density_feasible,
            "passed": self.passed,
        }

    def summary(self) -> str:
        mark = lambda ok: "pass" if ok else "fail"
        return "\n".join([
            f"CCNF check for {self.graph} (k={self.k}, c0={self.c0})",
            f"  (a) nodes {self.node_count} vs Moore bound {self.moore_bound}: "
            f"{mark(self.condition_a)} (deviation {self.moore_deviation:+d})",
            f"  (b) {self.cycles_checked} cycles of length {self.cycle_length}, "
            f"min S4 {self.min_s4_on_cycle} vs required {self.required_s4}: {mark(self.condition_b)}",
            f"  density k*c0 <= 2k+1: {'yes' if self.density_feasible else 'no'}",
            f"  overall: {mark(self.passed)}",
        ])


def check_ccnf_conditions(graph: GadgetGraph, spec: CcnfSpec) -> CcnfReport:
    """
    Check the Moore-size condition and the S4 density on shortest cycles

    (a) holds when the girth is odd and the node count equals the Moore
    bound for that girth. (b) holds when every cycle of length 2k+1 carries
    at least ceil(k*c0) S4 nodes.
    """
    from growth_lab import moore_size

    node_count = len(graph.nodes)
    if graph.girth is not None and graph.girth % 2 == 1 and graph.girth >= 3:
        bound = moore_size((graph.girth - 1) // 2)
    else:
        bound = moore_size(spec.k)
    condition_a = graph.girth is not None and graph.girth % 2 == 1 and node_count == bound

    cycle_length = 2 * spec.k + 1
    cycles = girth_cycles(graph.graph, cycle_length)
    counts = [sum(spec.kind_assignment[node] is GadgetKind.S4 for node in cycle) for cycle in cycles]
    condition_b = bool(counts) and min(counts) >= spec.required_s4

    report = CcnfReport(
        graph=graph.name,
        node_count=node_count,
        edge_count=len(graph.edges),
        girth=graph.girth,
        k=spec.k,
        c0=spec.c0,
        moore_bound=bound,
        moore_deviation=node_count - bound,
        condition_a=condition_a,
        cycle_length=cycle_length,
        cycles_checked=len(cycles),
        min_s4_on_cycle=min(counts) if counts else None,
        required_s4=spec.required_s4,
        condition_b=condition_b,
        density_feasible=spec.k * spec.c0 <= 2 * spec.k + 1,
    )
    logger.debug(report.summary())
    return report


@dataclass(frozen=True)
class GenerationSpec:
    """Parsed CCNF generation request"""

    graph: Union[str, RandomCubicSpec]
    kinds: Union[str, Tuple[str, ...]] = "all-s4"
    c0: Fraction = DEFAULT_C0
    polarity_seed: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "graph": self.graph if isinstance(self.graph, str) else self.graph.to_json(),
            "kinds": self.kinds if isinstance(self.kinds, str) else list(self.kinds),
            "c0": str(self.c0),
            "polarity_seed": self.polarity_seed,
        }


def parse_c0(value: Union[str, int, float, Fraction]) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise CcnfError(f"Invalid c0 {value!r}, expected a rational such as 2 or 3/2")


def parse_graph_source(value: Union[str, Dict[str, Any]], default_seed: int = 0) -> Union[str, RandomCubicSpec]:
    """Graph name, or a random spec given as a dict or a JSON object string"""
    if isinstance(value, str):
        text = value.strip()
        if not text.startswith("{"):
            if text.lower() not in NAMED_GRAPHS:
                raise CcnfError(f"Unknown graph {value!r}, expected one of {', '.join(NAMED_GRAPHS)}")
            return text.lower()
        try:
            value = json.loads(text)
        except json.JSONDecodeError as e:
            raise CcnfError(f"Invalid graph spec {value!r}: {e}")
    try:
        return RandomCubicSpec(int(value["nodes"]), int(value.get("min_girth", 3)),
                               int(value.get("seed", default_seed)))
    except (KeyError, TypeError, ValueError) as e:
        raise CcnfError(f"Invalid random graph spec {value!r}: {e}")


def load_generation_spec(document: Union[str, Dict[str, Any]], default_seed: int = 0) -> GenerationSpec:
    """
    Parse a generation spec document

    Expected shape: {"graph": name | {"nodes", "min_girth", "seed"},
    "kinds": "all-s4" | "all-s3" | [per-node], "c0": rational, "polarity_seed": int}
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise CcnfError(f"Invalid generation spec: {e}")
    if not isinstance(document, dict) or "graph" not in document:
        raise CcnfError("Generation spec must be a JSON object with a 'graph' entry")

    kinds = document.get("kinds", "all-s4")
    seed = document.get("polarity_seed")
    return GenerationSpec(
        graph=parse_graph_source(document["graph"], default_seed),
        kinds=kinds if isinstance(kinds, str) else tuple(kinds),
        c0=parse_c0(document.get("c0", DEFAULT_C0)),
        polarity_seed=None if seed is None else int(seed),
    )


@dataclass(frozen=True)
class CcnfInstance:
    generation: GenerationSpec
    graph: GadgetGraph
    spec: CcnfSpec
    formula: Formula
    report: CcnfReport

    def sidecar(self) -> Dict[str, Any]:
        data = {
            "generation": self.generation.to_json(),
            "k": self.spec.k,
            "c0": str(self.spec.c0),
        }
        data.update(self.graph.sidecar())
        return data


def build_instance(generation: GenerationSpec,
                   attempts: int = DEFAULT_GRAPH_ATTEMPTS) -> CcnfInstance:
    """
    Generate a CCNF instance end to end: graph, gadget kinds, polarities,
    assembly and condition report
    """
    skeleton = cubic_graph(generation.graph, attempts)
    if skeleton.girth is None or skeleton.girth % 2 == 0:
        raise CcnfError(f"Graph {skeleton.name} has girth {skeleton.girth}; CCNF needs an odd girth")

    kinds = parse_kinds(generation.kinds, len(skeleton.nodes))
    polarities = None
    if generation.polarity_seed is not None:
        polarities = random_polarities(skeleton, generation.polarity_seed)

    seed = generation.polarity_seed
    if seed is None and isinstance(generation.graph, RandomCubicSpec):
        seed = generation.graph.seed

    spec = CcnfSpec((skeleton.girth - 1) // 2, generation.c0, kinds, polarities, seed)
    graph = skeleton.with_assignment(kinds, spec.polarities(len(skeleton.nodes)))
    formula = assemble_ccnf(graph, spec)
    report = check_ccnf_conditions(graph, spec)
    logger.info(f"Generated {graph.name}: {len(formula.clauses)} clauses, "
                f"{formula.variable_count} variables, conditions {'pass' if report.passed else 'fail'}")
    return CcnfInstance(generation, graph, spec, formula, report)


def main():
    """Main function for command line"""
    parser = argparse.ArgumentParser(description='Generate a CCNF instance on a cubic graph')
    parser.add_argument('graph', help='k4, petersen, mcgee or a JSON random spec')
    parser.add_argument('--kinds', default='all-s4', help='all-s3 or all-s4 (default: all-s4)')
    parser.add_argument('--c0', default='2', help='S4 density constant, > 1 (default: 2)')

    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)

    try:
        instance = build_instance(GenerationSpec(parse_graph_source(args.graph), args.kinds, parse_c0(args.c0)))
    except CcnfError as e:
        logger.error(f"Error: {e}")
        exit(1)

    print(emit_dimacs(instance.formula), end="")
    print(instance.report.summary())


if __name__ == "__main__":
    main()
