"""Permutations, unshuffles and Koszul signs.

A permutation is stored by its list of images ``(σ(1), …, σ(k))``. It acts on a
sequence ``x₁ … x_k`` by rearranging it into ``x_{σ(1)} … x_{σ(k)}``, and the
Koszul sign of that rearrangement is the number ε with

    x_{σ(1)} ⋯ x_{σ(k)} = ε · x₁ ⋯ x_k

in a graded-commutative setting.
"""

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, List, Sequence, Tuple

from shlrkit.errors import ArgumentError

DegreeList = Sequence[int]


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1, …, k}`` given by its 1-based images.

    Args:
        images: The tuple ``(σ(1), …, σ(k))``.

    Raises:
        ArgumentError: If ``images`` is not a bijection of ``{1, …, k}``.
    """

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ArgumentError(f"{images} is not a permutation of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self) -> Iterator[int]:
        return iter(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for position, image in enumerate(self.images, start=1):
            inv[image - 1] = position
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, len(self.images) + 1))

    def __str__(self) -> str:
        return "(" + " ".join(str(i) for i in self.images) + ")"


def compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """Rearrange with ``tau`` and then rearrange the result with ``sigma``.

    The composite sends position ``i`` to ``tau(sigma(i))``, so that
    ``koszul_sign(d, compose(sigma, tau))`` equals
    ``koszul_sign(d, tau) * koszul_sign(permute(d, tau), sigma)``.

    Raises:
        ArgumentError: If the permutations have different lengths.
    """
    if len(sigma) != len(tau):
        raise ArgumentError("cannot compose permutations of different lengths")
    return Permutation(tuple(tau(sigma(i)) for i in range(1, len(sigma) + 1)))


def permute(values: Sequence, sigma: Permutation) -> List:
    """Return ``[values[σ(1)], …, values[σ(k)]]`` (1-based images)."""
    if len(values) != len(sigma):
        raise ArgumentError(
            f"cannot permute {len(values)} values with a permutation of length {len(sigma)}"
        )
    return [values[i - 1] for i in sigma]


def adjacent_transpositions(sigma: Permutation, strategy: str = "bubble") -> List[int]:
    """Decompose the rearrangement ``sigma`` into adjacent swaps.

    The returned list holds 0-based positions ``j``; swapping positions ``j`` and
    ``j + 1`` in order, starting from ``(σ(1), …, σ(k))``, sorts the arrangement
    back to the identity.

    Args:
        sigma: The permutation to decompose.
        strategy: ``"bubble"`` (left-to-right passes) or ``"insertion"``
            (moves each entry left into place). The two give different
            words for the same permutation.

    Returns:
        The list of swap positions.
    """
    arrangement = list(sigma.images)
    swaps: List[int] = []
    if strategy == "bubble":
        changed = True
        while changed:
            changed = False
            for j in range(len(arrangement) - 1):
                if arrangement[j] > arrangement[j + 1]:
                    arrangement[j], arrangement[j + 1] = arrangement[j + 1], arrangement[j]
                    swaps.append(j)
                    changed = True
    elif strategy == "insertion":
        for i in range(1, len(arrangement)):
            j = i
            while j > 0 and arrangement[j - 1] > arrangement[j]:
                arrangement[j - 1], arrangement[j] = arrangement[j], arrangement[j - 1]
                swaps.append(j - 1)
                j -= 1
    else:
        raise ArgumentError(f"unknown decomposition strategy: {strategy}")
    return swaps


def koszul_sign(
    degrees: DegreeList, sigma: Permutation, strategy: str = "bubble"
) -> int:
    """Koszul sign of rearranging homogeneous elements of the given degrees.

    Each adjacent swap of entries ``a`` and ``b`` contributes
    ``(-1)^(|a||b|)``.

    Args:
        degrees: Degrees ``|x₁|, …, |x_k|``.
        sigma: The rearrangement.
        strategy: Decomposition used, see :func:`adjacent_transpositions`.

    Returns:
        ``+1`` or ``-1``.

    Raises:
        ArgumentError: If ``degrees`` and ``sigma`` have different lengths.
    """
    if len(degrees) != len(sigma):
        raise ArgumentError(
            f"degree list of length {len(degrees)} does not match permutation of length {len(sigma)}"
        )
    arrangement = list(sigma.images)
    sign = 1
    for j in adjacent_transpositions(sigma, strategy):
        a, b = arrangement[j], arrangement[j + 1]
        if degrees[a - 1] % 2 and degrees[b - 1] % 2:
            sign = -sign
        arrangement[j], arrangement[j + 1] = b, a
    return sign


def unshuffles(l: int, m: int) -> List[Permutation]:
    """All ``(l, m)``-unshuffles in lexicographic order.

    An unshuffle is increasing on its first ``l`` and on its last ``m``
    images. There are ``binomial(l + m, l)`` of them.

    Raises:
        ArgumentError: If ``l`` or ``m`` is negative.
    """
    if l < 0 or m < 0:
        raise ArgumentError(f"unshuffle block sizes must be nonnegative, got ({l}, {m})")
    n = l + m
    result = []
    for head in itertools.combinations(range(1, n + 1), l):
        chosen = set(head)
        tail = tuple(i for i in range(1, n + 1) if i not in chosen)
        result.append(Permutation(head + tail))
    return result


def unshuffle_count(l: int, m: int) -> int:
    return comb(l + m, l)


def split_by(
    values: Sequence, sigma: Permutation, head: int
) -> Tuple[List, List]:
    """Split ``permute(values, sigma)`` after its first ``head`` entries."""
    arranged = permute(values, sigma)
    return arranged[:head], arranged[head:]
