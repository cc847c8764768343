import numpy as np
import pytest

from hodgeflow.complexes import SimplicialComplex2, enumerate_3cliques

# 7-vertex reference complex used throughout the tests: 11 edges, three
# filled triangles, two unfilled 1-holes.  Expected matrices, Betti numbers
# and curl/divergence expressions were worked out by hand from the
# increasing-index orientation convention and are frozen in the test files.
REF_EDGES = ((0, 1), (1, 2), (1, 5), (1, 6), (5, 6), (0, 6),
             (2, 5), (4, 5), (2, 4), (2, 3), (3, 4))
REF_TRIANGLES = ((1, 5, 6), (1, 2, 5), (2, 4, 5))


@pytest.fixture
def ref_complex():
    return SimplicialComplex2(7, REF_EDGES, REF_TRIANGLES)


def make_random_complex(rng, num_vertices, edge_prob, fill_prob=0.5):
    """Erdos-Renyi graph with a random subset of 3-cliques filled in.

    Not conditioned on connectivity; algebraic identities must hold anyway.
    """
    edges = tuple((i, j)
                  for i in range(num_vertices)
                  for j in range(i + 1, num_vertices)
                  if rng.random() < edge_prob)
    graph = SimplicialComplex2(num_vertices, edges)
    triangles = tuple(t for t in enumerate_3cliques(graph) if rng.random() < fill_prob)
    return SimplicialComplex2(num_vertices, edges, triangles)
