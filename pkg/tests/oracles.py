"""Independent reference implementations used as test oracles.

Nothing here shares code with the package paths under test: conditional
mutual information is computed from explicit conditional-probability
tables, and optimal action values come from value iteration over an
enumerated MDP.
"""

from __future__ import annotations

import math
from itertools import product


def brute_force_cmi(joint: dict[tuple, float]) -> float:
    """I(X; Y | Z) in nats from an exact joint p(x, y, z).

    Uses the conditional decomposition
        sum_z p(z) sum_{x,y} p(x,y|z) log [ p(x,y|z) / (p(x|z) p(y|z)) ]
    built from explicit conditional tables.
    """
    total = sum(joint.values())
    zs = {z for (_, _, z) in joint}
    acc = 0.0
    for z in zs:
        cell = {(x, y): p for (x, y, zz), p in joint.items() if zz == z and p > 0.0}
        p_z = sum(cell.values()) / total
        if p_z == 0.0:
            continue
        norm = sum(cell.values())
        p_xy_given_z = {k: v / norm for k, v in cell.items()}
        p_x_given_z: dict = {}
        p_y_given_z: dict = {}
        for (x, y), p in p_xy_given_z.items():
            p_x_given_z[x] = p_x_given_z.get(x, 0.0) + p
            p_y_given_z[y] = p_y_given_z.get(y, 0.0) + p
        inner = 0.0
        for (x, y), p in p_xy_given_z.items():
            inner += p * math.log(p / (p_x_given_z[x] * p_y_given_z[y]))
        acc += p_z * inner
    return acc


def two_cell_joint(leak_mix: float, flip_prob: float = 0.2) -> dict[tuple, float]:
    """Exact joint p(i_next, e, (i, b, a)) of a 2-cell, 2-temperature toy system.

    The base state distribution correlates the internal, boundary, and
    external bits; the next internal bit follows the boundary (flipped with
    `flip_prob`) except that with probability `leak_mix` it copies the
    external bit directly.  leak_mix = 0 is a factored system.
    """
    joint: dict[tuple, float] = {}
    for i, b, e, a in product((0, 1), repeat=4):
        p_base = 0.5 * (0.7 if b == i else 0.3) * (0.6 if e == b else 0.4) * 0.5
        for i_next in (0, 1):
            follow = (1.0 - flip_prob) if i_next == b else flip_prob
            copy_e = 1.0 if i_next == e else 0.0
            p_next = (1.0 - leak_mix) * follow + leak_mix * copy_e
            if p_next > 0.0:
                key = (i_next, e, (i, b, a))
                joint[key] = joint.get(key, 0.0) + p_base * p_next
    return joint


def value_iteration(
    n_states: int,
    n_actions: int,
    next_state,
    reward,
    gamma: float,
    tol: float = 1e-13,
    max_iters: int = 100000,
) -> dict[tuple[int, int], float]:
    """Optimal Q for a deterministic enumerated MDP."""
    q = {(s, a): 0.0 for s in range(n_states) for a in range(n_actions)}
    for _ in range(max_iters):
        delta = 0.0
        new_q = {}
        for s in range(n_states):
            for a in range(n_actions):
                s2 = next_state(s, a)
                target = reward(s, a) + gamma * max(q[(s2, a2)] for a2 in range(n_actions))
                new_q[(s, a)] = target
                delta = max(delta, abs(target - q[(s, a)]))
        q = new_q
        if delta < tol:
            break
    return q
