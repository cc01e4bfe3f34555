import itertools

import pytest

from subig.problems import BiigInstance, WmcigInstance


@pytest.fixture
def cover_example() -> WmcigInstance:
    """Three facility sites, four customers (profits 5, 9, 6, 4), follower
    opens two, leader removes one.  Site 0 covers {0,2}, site 1 covers {0,1},
    site 2 covers {0,2,3}."""
    return WmcigInstance(
        profits=(5, 9, 6, 4),
        cover=(frozenset({0, 2}), frozenset({0, 1}), frozenset({0, 2, 3})),
        B=2,
        k=1,
        name="cover-example",
    )


@pytest.fixture
def bipartite_example() -> BiigInstance:
    """Three items with activation probabilities (0.3, 0.5, 0.4) over four
    targets; arcs 0-0, 1-0, 1-1, 2-0, 2-2; follower picks two, leader one."""
    return BiigInstance(
        probs=(0.3, 0.5, 0.4),
        targets=4,
        arcs=((0, 0), (1, 0), (1, 1), (2, 0), (2, 2)),
        B=2,
        k=1,
        name="bipartite-example",
    )


def leader_feasible_vectors(n: int, k: int):
    """All binary interdiction vectors with at most k ones."""
    out = []
    for ones in range(k + 1):
        for chosen in itertools.combinations(range(n), ones):
            out.append(tuple(1 if i in chosen else 0 for i in range(n)))
    return out


def all_binary_vectors(n: int):
    return list(itertools.product((0, 1), repeat=n))
