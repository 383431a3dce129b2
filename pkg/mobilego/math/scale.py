"""Scaling-related mathematical functions.
"""

import numpy as np

import mobilego.utils.constants as c
import mobilego.utils.exception as e


def unitary_scale(x: np.ndarray) -> np.ndarray:
    """Scales an array between 0 and 1.

    Constant arrays (such as an empty plane) map to zeros.

    Args:
        x: A numpy array to be scaled.

    Returns:
        Scaled array.

    """

    x = x.astype("float32")

    x -= x.min()
    x *= 1.0 / (x.max() + c.EPSILON)

    return x


def upscale(plane: np.ndarray, cell: int) -> np.ndarray:
    """Blows every board point up to a ``cell`` x ``cell`` block of pixels.

    Args:
        plane: A (rows, cols) array.
        cell: Side of the block, in pixels.

    Returns:
        A (rows * cell, cols * cell) array.

    """

    if cell < 1:
        raise e.ValueError("`cell` should be >= 1")

    return np.kron(plane, np.ones((cell, cell), dtype=plane.dtype))
