import numpy as np


def zero_crossings(field):
    """Linearly interpolated sign changes of a 1-D field (``<= 0`` counts as inside)."""
    x = field.grid.axes[0]
    v = field.values
    out = []
    for i in range(len(x) - 1):
        if (v[i] <= 0) != (v[i + 1] <= 0):
            out.append(x[i] - v[i] * (x[i + 1] - x[i]) / (v[i + 1] - v[i]))
    return np.array(out)
