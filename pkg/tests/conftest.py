"""Shared test helpers: seeded random mixed piecewise-linear cdfs."""

import numpy as np

from thresholdgame.dists import MixedCdf


def random_mixed_piecewise_linear(rng: np.random.Generator) -> MixedCdf:
    """Draw a random mixed piecewise-linear cdf on [0, 1].

    Interior breakpoints are uniform order statistics; exponential weights are
    split between linear pieces and atoms at the breakpoints, with some
    weights zeroed so plateaus and purely continuous draws both occur.
    """
    while True:
        k = int(rng.integers(2, 7))
        xs = np.sort(rng.uniform(0.0, 1.0, size=k))
        xs = np.concatenate(([0.0], xs, [1.0]))
        if np.min(np.diff(xs)) > 1e-3:
            break
    n_seg = len(xs) - 1
    seg_w = rng.exponential(1.0, size=n_seg) * (rng.random(n_seg) > 0.25)
    atom_w = rng.exponential(1.0, size=len(xs)) * (rng.random(len(xs)) > 0.5)
    if seg_w[-1] == 0.0 and atom_w[-1] == 0.0:
        atom_w[-1] = rng.exponential(1.0)
    total = seg_w.sum() + atom_w.sum()
    seg_w /= total
    atom_w /= total

    knots = [(0.0, atom_w[0])] if atom_w[0] > 0.0 else [(0.0, 0.0)]
    v = atom_w[0]
    for i in range(1, len(xs)):
        v += seg_w[i - 1]
        knots.append((float(xs[i]), float(v)))
        if atom_w[i] > 0.0:
            v += atom_w[i]
            knots.append((float(xs[i]), float(v)))
    knots[-1] = (1.0, 1.0)
    return MixedCdf.piecewise_linear(knots)
