"""
Factor graphs and implicit Cartesian products.

Factors are small explicit graphs with a precomputed all-pairs distance table.
A product never materializes its vertex set: a vertex is a tuple with one
factor vertex per coordinate, two tuples are adjacent when they differ in
exactly one coordinate along an edge of that factor, and the product distance
is the sum of the factor distances. Passing is always legal, so adjacency lists
store no loops.
"""

import itertools
import re
import math
from functools import cached_property
from pathlib import Path
from typing import Iterator, List, NamedTuple, Sequence, Tuple, Union

import networkx as nx
import numpy as np

Vertex = Tuple[int, ...]

FACTOR_CAP = 1024  # Largest factor with an all-pairs distance table
EXPLICIT_CAP = 4096  # Largest product that may be materialized
STACK_CAP = 2**22  # Largest stacked distance table used for vectorized queries


class Metrics(NamedTuple):
    radius: int
    diameter: int
    center_vertex: Union[int, Vertex]


class FactorGraph:
    def __init__(self, adjacency: Sequence[Sequence[int]], name: str = "", cap: int = FACTOR_CAP):
        """
        Build a connected, undirected factor graph.

        Parameters
        ----------
        adjacency : sequence of sequences of int
            For each vertex, the list of its neighbors. Loops are implicit and must not be listed.
        name : str, optional
            Label used in specs and reports.
        cap : int, optional
            Largest accepted vertex count.

        Raises
        ------
        ValueError
            If the graph is empty, too large, has loops, is not symmetric or is not connected.

        """
        self.vertex_count = len(adjacency)
        self.name = name

        if self.vertex_count < 1:
            raise ValueError("A factor graph needs at least one vertex")
        if self.vertex_count > cap:
            raise ValueError(f"Factor has {self.vertex_count} vertices, above the cap of {cap}")

        self.adjacency = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        self.adjacency_sets = tuple(frozenset(nbrs) for nbrs in self.adjacency)

        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if v == u:
                    raise ValueError(f"Vertex {u} lists itself; loops are implicit")
                if not 0 <= v < self.vertex_count:
                    raise ValueError(f"Vertex {u} has out-of-range neighbor {v}")
                if u not in self.adjacency_sets[v]:
                    raise ValueError(f"Adjacency is not symmetric between {u} and {v}")

        graph = self.to_networkx()
        if not nx.is_connected(graph):
            raise ValueError(f"Factor graph {name or '?'} is not connected")
        self.is_tree = nx.is_tree(graph)

        # All-pairs distance table
        self.dist = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for u, lengths in nx.all_pairs_shortest_path_length(graph):
            for v, d in lengths.items():
                self.dist[u, v] = d

        self.eccentricity = self.dist.max(axis=1)
        self.radius = int(self.eccentricity.min())
        self.diameter = int(self.eccentricity.max())
        self.center = int(np.argmin(self.eccentricity))  # Lowest label on ties

    def __repr__(self):
        return f"FactorGraph({self.name or self.vertex_count})"

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @property
    def centers(self) -> List[int]:
        """All central vertices, in label order."""
        return [int(v) for v in np.flatnonzero(self.eccentricity == self.radius)]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from((u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v)
        return graph

    def step_toward(self, a: int, b: int) -> int:
        """The lowest-labelled neighbor of a that is one step closer to b."""
        if a == b:
            raise ValueError(f"No step toward {b} from itself")
        target = self.dist[a, b] - 1
        for w in self.adjacency[a]:
            if self.dist[w, b] == target:
                return w
        raise ValueError(f"No neighbor of {a} is closer to {b}")  # Unreachable in a connected graph

    def farthest(self, a: int) -> int:
        """The lowest-labelled vertex at maximum distance from a."""
        return int(np.argmax(self.dist[a]))


class ProductGraph:
    def __init__(self, factors: Sequence[FactorGraph], name: str = None, explicit_cap: int = EXPLICIT_CAP):
        """
        Implicit Cartesian product of factor graphs.

        Parameters
        ----------
        factors : sequence of FactorGraph
            The factors in coordinate order, at least one.
        name : str, optional
            Graph spec string, defaults to the factor names joined by 'x'.
        explicit_cap : int, optional
            Largest vertex count for which `explicit()` and vertex enumeration are allowed.

        """
        if len(factors) == 0:
            raise ValueError("A product needs at least one factor")

        self.factors = tuple(factors)
        self.n = len(self.factors)
        self.sizes = tuple(f.vertex_count for f in self.factors)
        self.vertex_count = math.prod(self.sizes)
        self.explicit_cap = explicit_cap
        self.name = name or "x".join(f.name or f"G{f.vertex_count}" for f in self.factors)
        self.is_hypercube = all(size == 2 for size in self.sizes)

        # Stack equal-size factor tables so distances to many vertices vectorize
        self._stack = None
        if len(set(self.sizes)) == 1 and self.n * self.sizes[0] ** 2 <= STACK_CAP:
            self._stack = np.stack([f.dist for f in self.factors])
            self._coords = np.arange(self.n)

    def __repr__(self):
        return f"ProductGraph({self.name})"

    @property
    def is_explicit(self) -> bool:
        return self.vertex_count <= self.explicit_cap

    @property
    def all_trees(self) -> bool:
        return all(f.is_tree for f in self.factors)

    @property
    def radius(self) -> int:
        return sum(f.radius for f in self.factors)

    @property
    def diameter(self) -> int:
        return sum(f.diameter for f in self.factors)

    @property
    def center(self) -> Vertex:
        return tuple(f.center for f in self.factors)

    def is_vertex(self, v) -> bool:
        return (
            isinstance(v, tuple)
            and len(v) == self.n
            and all(isinstance(x, (int, np.integer)) and 0 <= x < size for x, size in zip(v, self.sizes))
        )

    def distance(self, u: Vertex, v: Vertex) -> int:
        return int(sum(f.dist[a, b] for f, a, b in zip(self.factors, u, v)))

    def distances(self, sources, target: Vertex) -> np.ndarray:
        """
        Distances from many vertices to one target.

        Parameters
        ----------
        sources : sequence of Vertex or ndarray of shape (k, n)
            The source vertices.
        target : Vertex
            The common target.

        Returns
        -------
        ndarray of shape (k,)

        """
        arr = np.asarray(sources, dtype=np.int64).reshape(-1, self.n)
        tgt = np.asarray(target, dtype=np.int64)
        if self.is_hypercube:
            return (arr != tgt).sum(axis=1)
        if self._stack is not None:
            return self._stack[self._coords, arr, tgt].sum(axis=1)
        total = np.zeros(arr.shape[0], dtype=np.int64)
        for i, f in enumerate(self.factors):
            total += f.dist[arr[:, i], tgt[i]]
        return total

    def differing(self, u: Vertex, v: Vertex) -> List[int]:
        """Coordinates in which u and v disagree, in increasing order."""
        return [i for i, (a, b) in enumerate(zip(u, v)) if a != b]

    def neighbor_moves(self, v: Vertex) -> Iterator[Tuple[int, int]]:
        """(coordinate, new factor vertex) for every neighbor, lowest coordinate then lowest label first."""
        for i, (f, x) in enumerate(zip(self.factors, v)):
            for w in f.adjacency[x]:
                yield i, w

    def neighbors(self, v: Vertex) -> List[Vertex]:
        return [self.with_coord(v, i, w) for i, w in self.neighbor_moves(v)]

    def degree(self, v: Vertex) -> int:
        return sum(len(f.adjacency[x]) for f, x in zip(self.factors, v))

    def with_coord(self, v: Vertex, i: int, x: int) -> Vertex:
        return v[:i] + (x,) + v[i + 1 :]

    def is_adjacent(self, u: Vertex, v: Vertex) -> bool:
        diff = self.differing(u, v)
        return len(diff) == 1 and v[diff[0]] in self.factors[diff[0]].adjacency_sets[u[diff[0]]]

    def is_legal_move(self, u: Vertex, v: Vertex) -> bool:
        """A move is legal when it is a pass or follows an edge."""
        return u == v or self.is_adjacent(u, v)

    def step_in(self, u: Vertex, i: int, target: int) -> Vertex:
        """Step one edge in coordinate i toward the factor vertex target."""
        return self.with_coord(u, i, self.factors[i].step_toward(u[i], target))

    def step_toward(self, u: Vertex, v: Vertex) -> Vertex:
        """Step toward v in the lowest coordinate where u and v disagree."""
        for i, (a, b) in enumerate(zip(u, v)):
            if a != b:
                return self.step_in(u, i, b)
        raise ValueError(f"No step toward {v} from itself")

    def random_vertex(self, rng: np.random.Generator) -> Vertex:
        return tuple(int(rng.integers(size)) for size in self.sizes)

    def random_neighbor(self, v: Vertex, rng: np.random.Generator) -> Vertex:
        """A uniformly random neighbor of v, or v itself when it has none."""
        degrees = [len(f.adjacency[x]) for f, x in zip(self.factors, v)]
        total = sum(degrees)
        if total == 0:
            return v
        pick = int(rng.integers(total))
        for i, deg in enumerate(degrees):
            if pick < deg:
                return self.with_coord(v, i, self.factors[i].adjacency[v[i]][pick])
            pick -= deg
        raise RuntimeError("Neighbor sampling fell through")  # Unreachable

    def farthest_from(self, v: Vertex) -> Vertex:
        """Coordinatewise farthest vertex, the antipode on a hypercube."""
        return tuple(f.farthest(x) for f, x in zip(self.factors, v))

    def index(self, v: Vertex) -> int:
        """Mixed-radix label; label order equals lexicographic tuple order."""
        idx = 0
        for x, size in zip(v, self.sizes):
            idx = idx * size + x
        return idx

    def vertex(self, idx: int) -> Vertex:
        coords = []
        for size in reversed(self.sizes):
            idx, x = divmod(idx, size)
            coords.append(x)
        return tuple(reversed(coords))

    def vertices(self) -> Iterator[Vertex]:
        """All vertices in label order, only for explicit-size products."""
        self._require_explicit()
        return itertools.product(*(range(size) for size in self.sizes))

    def _require_explicit(self):
        if not self.is_explicit:
            raise ValueError(f"{self.name} has {self.vertex_count} vertices, above the explicit cap of {self.explicit_cap}")

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Explicit adjacency lists over vertex labels."""
        self._require_explicit()
        return tuple(tuple(sorted(self.index(w) for w in self.neighbors(v))) for v in self.vertices())

    def explicit(self) -> nx.Graph:
        """The product as a networkx graph on vertex labels, for oracle cross-checks."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from((u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v)
        return graph

    def pack(self, v: Vertex) -> int:
        """Bit vector of a hypercube vertex, coordinate 0 is the most significant bit."""
        if not self.is_hypercube:
            raise ValueError("Only hypercube vertices pack into bit vectors")
        return self.index(v)

    def unpack(self, bits: int) -> Vertex:
        if not self.is_hypercube:
            raise ValueError("Only hypercube vertices unpack from bit vectors")
        return self.vertex(bits)

    def format_vertex(self, v: Vertex) -> str:
        if self.is_hypercube:
            return "".join(str(x) for x in v)
        if self.n == 1:
            return str(v[0])
        return "(" + ",".join(str(x) for x in v) + ")"

    def parse_vertex(self, text: str) -> Vertex:
        """Inverse of `format_vertex`; also accepts comma-separated coordinates."""
        text = text.strip()
        if self.is_hypercube and set(text) <= {"0", "1"} and len(text) == self.n:
            v = tuple(int(ch) for ch in text)
        else:
            v = tuple(int(part) for part in text.strip("()").split(",") if part.strip())
        if not self.is_vertex(v):
            raise ValueError(f"{text!r} is not a vertex of {self.name}")
        return v


def path_graph(m: int, cap: int = FACTOR_CAP) -> FactorGraph:
    """Path on m vertices labelled 0..m-1."""
    if m < 1:
        raise ValueError(f"A path needs at least one vertex, got {m}")
    return FactorGraph([[u for u in (v - 1, v + 1) if 0 <= u < m] for v in range(m)], name=f"P{m}", cap=cap)


def star_graph(leaves: int) -> FactorGraph:
    """Star with center 0 and leaves 1..leaves."""
    if leaves < 0:
        raise ValueError(f"Leaf count must be nonnegative, got {leaves}")
    adjacency = [list(range(1, leaves + 1))] + [[0] for _ in range(leaves)]
    return FactorGraph(adjacency, name=f"S{leaves}")


def cycle_graph(m: int) -> FactorGraph:
    if m < 3:
        raise ValueError(f"A cycle needs at least three vertices, got {m}")
    return FactorGraph([[(v - 1) % m, (v + 1) % m] for v in range(m)], name=f"C{m}")


def from_networkx(graph: nx.Graph, name: str = "", cap: int = FACTOR_CAP) -> FactorGraph:
    """Factor graph from a networkx graph whose nodes are 0..V-1."""
    nodes = sorted(graph.nodes)
    if nodes != list(range(len(nodes))):
        graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    adjacency = [[w for w in graph.neighbors(v) if w != v] for v in range(graph.number_of_nodes())]
    return FactorGraph(adjacency, name=name, cap=cap)


def random_tree(size: int, seed: int, cap: int = FACTOR_CAP) -> FactorGraph:
    """
    Uniformly random labelled tree, decoded from a uniformly random Prüfer sequence.

    Parameters
    ----------
    size : int
        Number of vertices, at least one.
    seed : int
        Seed of the Prüfer sequence draw.
    cap : int, optional
        Largest accepted size.

    """
    if size < 1:
        raise ValueError(f"A tree needs at least one vertex, got {size}")
    name = f"T{size}:{seed}"
    if size == 1:
        return FactorGraph([[]], name=name, cap=cap)
    rng = np.random.default_rng(seed)
    sequence = [int(x) for x in rng.integers(0, size, size - 2)]
    return from_networkx(nx.from_prufer_sequence(sequence), name=name, cap=cap)


def tree_from_parents(path: Union[str, Path], name: str = None, cap: int = FACTOR_CAP) -> FactorGraph:
    """
    Load a tree from a text file of parent indices.

    Line i holds the parent of vertex i; the root has parent -1. Blank lines and
    lines starting with '#' are ignored.

    """
    path = Path(path)
    parents = [
        int(line.split()[0])
        for line in path.read_text(encoding="utf8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if parents.count(-1) != 1:
        raise ValueError(f"{path} must name exactly one root (parent -1)")

    adjacency = [[] for _ in parents]
    for child, parent in enumerate(parents):
        if parent == -1:
            continue
        if not 0 <= parent < len(parents):
            raise ValueError(f"{path}: vertex {child} has out-of-range parent {parent}")
        adjacency[child].append(parent)
        adjacency[parent].append(child)

    tree = FactorGraph(adjacency, name=name or f"file:{path}", cap=cap)
    if not tree.is_tree:
        raise ValueError(f"{path} does not describe a tree")
    return tree


_K2 = None


def hypercube(n: int, explicit_cap: int = EXPLICIT_CAP) -> ProductGraph:
    """Q_n as the n-fold product of K_2; vertices are n-bit tuples."""
    global _K2
    if n < 1:
        raise ValueError(f"Hypercube dimension must be positive, got {n}")
    if _K2 is None:
        _K2 = path_graph(2)
    return ProductGraph([_K2] * n, name=f"Q{n}", explicit_cap=explicit_cap)


def product(
    factors: Sequence[Union[FactorGraph, ProductGraph]], name: str = None, explicit_cap: int = EXPLICIT_CAP
) -> ProductGraph:
    """Cartesian product of the given graphs; products among them are flattened into their factors."""
    if len(factors) == 0:
        raise ValueError("Empty factor list")
    flat = []
    for g in factors:
        flat.extend(g.factors if isinstance(g, ProductGraph) else [g])
    if name is None and len(factors) == 1 and isinstance(factors[0], ProductGraph):
        name = factors[0].name
    return ProductGraph(flat, name=name, explicit_cap=explicit_cap)


def as_product(g: Union[FactorGraph, ProductGraph]) -> ProductGraph:
    return g if isinstance(g, ProductGraph) else ProductGraph([g], name=g.name or None)


_ATOM_START = re.compile(r"[QPT]\d|file:")
_DIGITS = re.compile(r"\d+")


class GraphSpecError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


def _read_int(spec: str, pos: int, what: str):
    match = _DIGITS.match(spec, pos)
    if match is None:
        raise GraphSpecError(f"Expected {what}", pos)
    return int(match.group()), match.end()


def parse_graph_spec(spec: str, explicit_cap: int = EXPLICIT_CAP, factor_cap: int = FACTOR_CAP) -> ProductGraph:
    """
    Build a graph from a spec string.

    Grammar: ``spec := atom ('x' atom)*`` with ``atom := Q<n> | P<m> | T<size>:<seed> | file:<path>``.
    A file path runs up to an 'x' that starts another atom, or to the end.

    Parameters
    ----------
    spec : str
        The spec string, also used as the graph name.
    explicit_cap : int, optional
        Explicit cap of the resulting product.
    factor_cap : int, optional
        Largest vertex count accepted for a path, tree or file factor.

    Raises
    ------
    GraphSpecError
        With the position of the first unexpected character, or of a factor that cannot be built.

    """
    factors = []
    pos = 0
    if not spec:
        raise GraphSpecError("Empty graph spec", 0)

    while True:
        if spec.startswith("file:", pos):
            start = pos + len("file:")
            end = start
            while end < len(spec) and not (spec[end] == "x" and _ATOM_START.match(spec, end + 1)):
                end += 1
            if end == start:
                raise GraphSpecError("Expected a file path", start)
            try:
                factors.append(tree_from_parents(spec[start:end], cap=factor_cap))
            except (OSError, ValueError) as e:
                raise GraphSpecError(f"Cannot load {spec[start:end]!r}: {e}", start) from e
            pos = end
        elif spec.startswith("Q", pos):
            n, end = _read_int(spec, pos + 1, "a hypercube dimension")
            if n < 1:
                raise GraphSpecError("Hypercube dimension must be positive", pos + 1)
            factors.append(hypercube(n))
            pos = end
        elif spec.startswith("P", pos):
            m, end = _read_int(spec, pos + 1, "a path length")
            if m < 1:
                raise GraphSpecError("Path length must be positive", pos + 1)
            if m > factor_cap:
                raise GraphSpecError(f"Path length {m} is above the factor cap of {factor_cap}", pos + 1)
            factors.append(path_graph(m, cap=factor_cap))
            pos = end
        elif spec.startswith("T", pos):
            size, end = _read_int(spec, pos + 1, "a tree size")
            if end >= len(spec) or spec[end] != ":":
                raise GraphSpecError("Expected ':' between tree size and seed", end)
            seed, end = _read_int(spec, end + 1, "a tree seed")
            if size < 1:
                raise GraphSpecError("Tree size must be positive", pos + 1)
            if size > factor_cap:
                raise GraphSpecError(f"Tree size {size} is above the factor cap of {factor_cap}", pos + 1)
            factors.append(random_tree(size, seed, cap=factor_cap))
            pos = end
        else:
            raise GraphSpecError("Expected Q, P, T or file:", pos)

        if pos == len(spec):
            break
        if spec[pos] != "x":
            raise GraphSpecError("Expected 'x' between factors", pos)
        pos += 1

    return product(factors, name=spec, explicit_cap=explicit_cap)


def distance(g: ProductGraph, u: Vertex, v: Vertex) -> int:
    """Product distance, the sum of the factor distances."""
    return g.distance(u, v)


def metrics(g: Union[FactorGraph, ProductGraph]) -> Metrics:
    """Radius, diameter and lowest-labelled central vertex of a factor or product."""
    return Metrics(g.radius, g.diameter, g.center)


def bfs_metrics(g: ProductGraph) -> Metrics:
    """Metrics computed by BFS on the explicit product, as an oracle for `metrics`."""
    eccentricity = nx.eccentricity(g.explicit())
    radius = min(eccentricity.values())
    center = min(v for v, e in eccentricity.items() if e == radius)
    return Metrics(radius, max(eccentricity.values()), g.vertex(center))


def tree_step_toward(t: FactorGraph, source: int, target: int) -> int:
    """The unique neighbor of source on the tree path to target."""
    if not t.is_tree:
        raise ValueError(f"{t!r} is not a tree")
    if source == target:
        raise ValueError("Source and target coincide; there is no step to take")
    return t.step_toward(source, target)
