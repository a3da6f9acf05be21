"""
Scalar probe of the weighted-sum / weighted-average equivalence under
multiplicative perturbations.

    a_k = beta (a_{k-1} + delta_{k-1} a_{k-1}) + b_k
    c_k = beta (c_{k-1} + delta_{k-1} c_{k-1}) + (1 - beta) b_k

with a and c starting from zero. Since the recursion is linear in b,
c_k = (1 - beta) a_k for every perturbation sequence with |delta_k| <= q.
"""

from typing import List, Optional, Sequence, Tuple


def alternating_deltas(q: float, length: int) -> List[float]:
    """+q, -q, +q, ... of the given length."""
    return [q if k % 2 == 0 else -q for k in range(length)]


def adam_equivalence_probe(beta: float, q: float, input_seq: Sequence[float],
                           deltas: Optional[Sequence[float]] = None) -> Tuple[List[float], List[float]]:
    """
    Run both recursions over `input_seq`.

    Args:
        beta: Decay in (0, 1)
        q: Perturbation bound in [0, 1)
        input_seq: Driving sequence b_k
        deltas: Relative perturbations, defaults to alternating +-q

    Returns:
        (a sequence, c sequence), each as long as input_seq
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must be in [0, 1), got {q}")
    if deltas is None:
        deltas = alternating_deltas(q, len(input_seq))
    if len(deltas) < len(input_seq):
        raise ValueError(f"need {len(input_seq)} perturbations, got {len(deltas)}")
    for k, d in enumerate(deltas):
        if abs(d) > q:
            raise ValueError(f"|delta_{k}| = {abs(d)} exceeds q = {q}")

    a_seq: List[float] = []
    c_seq: List[float] = []
    a = c = 0.0
    prev_delta = 0.0
    for k, b in enumerate(input_seq):
        a = beta * (a + prev_delta * a) + b
        c = beta * (c + prev_delta * c) + (1.0 - beta) * b
        a_seq.append(a)
        c_seq.append(c)
        prev_delta = deltas[k]
    return a_seq, c_seq
