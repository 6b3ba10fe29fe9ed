import random

import numpy as np
import pytest

from graphrecourse.datasets import random_graph
from graphrecourse.graphs import LabeledGraph


@pytest.fixture
def rng():
    return random.Random(20260826)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20260826)


def triangle() -> LabeledGraph:
    return LabeledGraph.build("CCC", [(0, 1), (1, 2), (0, 2)])


def path3() -> LabeledGraph:
    return LabeledGraph.build("CCC", [(0, 1), (1, 2)])


def star(labels, edges=None) -> LabeledGraph:
    labels = list(labels)
    return LabeledGraph.build(
        labels, edges if edges is not None else [(0, i) for i in range(1, len(labels))]
    )


def random_graphs(seed, count, n_lo, n_hi, alphabet="CNO", p=0.35):
    r = random.Random(seed)
    return [random_graph(r, r.randint(n_lo, n_hi), alphabet, p)
            for _ in range(count)]
