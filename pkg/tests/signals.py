"""Noise-free finite-rank signals with known continuations."""

import numpy as np

TAU = 2 * np.pi

# name -> (function of n, rank)
FAMILIES = {
    "constant": (lambda n: np.full(n.shape, 3.0), 1),
    "line": (lambda n: 2.0 + 0.5 * n, 2),
    "quadratic": (lambda n: 1.0 - 0.2 * n + 0.01 * n**2, 3),
    "exponential": (lambda n: np.exp(0.02 * n), 1),
    "sine": (lambda n: np.sin(TAU * n / 12 + 0.4), 2),
    "damped_sine": (lambda n: np.exp(-0.01 * n) * np.cos(TAU * n / 7), 2),
    "growing_sine": (lambda n: np.exp(0.01 * n) * np.sin(TAU * n / 12), 2),
    "exp_plus_sine": (lambda n: np.exp(0.005 * n) + np.exp(0.01 * n) * np.sin(TAU * n / 10), 3),
    "line_two_sines": (
        lambda n: 1 + 0.05 * n + np.sin(TAU * n / 12) + 0.5 * np.cos(TAU * n / 5), 6),
    "three_sines": (
        lambda n: np.sin(TAU * n / 12) + 0.7 * np.sin(TAU * n / 4.5 + 1) + 0.4 * np.cos(TAU * n / 30),
        6),
}


def random_signal(rng, L=40, max_rank=6):
    """Random sum of one trend term and modulated sines with well separated roots.

    The trend is a constant, an exponential or a line; sine frequencies lie
    in [0.05, 0.45] and differ pairwise (and from 0) by at least ``1 / L``.
    Returns ``(f, rank)`` where ``f`` maps integer times to values.
    """
    trend = rng.choice(["none", "constant", "exp", "line"])
    a, b = rng.uniform(0.5, 2.0), rng.uniform(-0.05, 0.05)
    rank = {"none": 0, "constant": 1, "exp": 1, "line": 2}[trend]
    terms = {
        "none": [],
        "constant": [lambda n: np.full(n.shape, a)],
        "exp": [lambda n: a * np.exp(b / 2 * n)],
        "line": [lambda n: a + b * n],
    }[trend]
    freqs = []
    nsines = rng.integers(0 if rank else 1, (max_rank - rank) // 2 + 1)
    while len(freqs) < nsines:
        w = rng.uniform(0.05, 0.45)
        if all(abs(w - v) >= 1 / L for v in freqs):
            freqs.append(w)
    for w in freqs:
        amp, alpha, phi = rng.uniform(0.3, 2.0), rng.uniform(-0.01, 0.01), rng.uniform(0, TAU)
        terms.append(lambda n, A=amp, al=alpha, w=w, f=phi: A * np.exp(al * n) * np.cos(TAU * w * n + f))
    return (lambda n: sum(t(n) for t in terms)), rank + 2 * len(freqs)
