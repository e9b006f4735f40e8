"""
Nested-set kernels on bitmask-encoded subsets.

Two subsets are compatible when one contains the other or they are disjoint.
A family of subsets is nested when it is pairwise compatible, so nested sets are
the cliques of the compatibility graph.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np

from hassettcore.common import Label, label_mask

# Add Numba for JIT compilation if available
try:
    from numba import jit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    def jit(*args, **kwargs):
        def decorator(func):
            return func
        return decorator


@jit(nopython=True, cache=True)
def _compatibility(masks):
    size = masks.shape[0]
    out = np.zeros((size, size), dtype=np.bool_)
    for i in range(size):
        for j in range(size):
            meet = masks[i] & masks[j]
            out[i, j] = meet == 0 or meet == masks[i] or meet == masks[j]
    return out


def compatibility_matrix(labels: Sequence[Label]) -> np.ndarray:
    """Boolean matrix M[i, j] = labels i and j are nested (comparable or disjoint)."""
    masks = np.array([label_mask(label) for label in labels], dtype=np.int64)
    return _compatibility(masks)


def is_compatible(s: Label, t: Label) -> bool:
    a, b = label_mask(s), label_mask(t)
    meet = a & b
    return meet == 0 or meet == a or meet == b


def is_nested_family(labels: Sequence[Label]) -> bool:
    return all(
        is_compatible(labels[i], labels[j])
        for i in range(len(labels))
        for j in range(i + 1, len(labels))
    )


def nested_index_sets(compatible: np.ndarray, max_size: int) -> Dict[int, List[Tuple[int, ...]]]:
    """
    All nested index sets of each size up to max_size.

    Depth-first extension in increasing index order, so every list is sorted
    lexicographically.

    Args:
        compatible: square compatibility matrix
        max_size: largest family size to report

    Returns:
        Dict[int, List[Tuple[int, ...]]]: size -> index tuples
    """
    size = compatible.shape[0]
    neighbours = [
        [j for j in range(i + 1, size) if compatible[i, j]] for i in range(size)
    ]
    found: Dict[int, List[Tuple[int, ...]]] = {k: [] for k in range(1, max_size + 1)}

    def extend(current: Tuple[int, ...], candidates: List[int]):
        found[len(current)].append(current)
        if len(current) == max_size:
            return
        for position, j in enumerate(candidates):
            extend(
                current + (j,),
                [k for k in candidates[position + 1:] if compatible[j, k]],
            )

    if max_size >= 1:
        for i in range(size):
            extend((i,), neighbours[i])
    return found
