import networkx as nx
import numpy as np

from pycaptime.engine import CopStrategy, RobberStrategy, Transcript, play, replay
from pycaptime.graphs import ProductGraph, random_tree


class Helper:
    @staticmethod
    def bits(text: str) -> tuple:
        return tuple(int(ch) for ch in text)

    @staticmethod
    def tree_pairs(count: int, max_size: int = 8, seed: int = 0):
        """Seeded pairs of random trees with 2..max_size vertices each."""
        rng = np.random.default_rng(seed)
        pairs = []
        for i in range(count):
            sizes = rng.integers(2, max_size + 1, size=2)
            pairs.append((random_tree(int(sizes[0]), 2 * i), random_tree(int(sizes[1]), 2 * i + 1)))
        return pairs

    @staticmethod
    def play_checked(graph: ProductGraph, k: int, cops: CopStrategy, robber: RobberStrategy, **kwargs) -> Transcript:
        """Play one game and re-validate its transcript."""
        transcript = play(graph, k, cops, robber, **kwargs)
        replay(transcript, graph)
        return transcript

    @staticmethod
    def oracle_distances(graph: ProductGraph, source) -> dict:
        """BFS distances on the explicit product, keyed by vertex tuple."""
        lengths = nx.single_source_shortest_path_length(graph.explicit(), graph.index(source))
        return {graph.vertex(v): d for v, d in lengths.items()}
