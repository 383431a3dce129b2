"""Image-related visualization of encoded planes.
"""

from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image

import mobilego.math.scale as scl
import mobilego.utils.exception as e


def _rasterize(t: np.ndarray, columns: int, cell: int, spacing: int) -> np.ndarray:
    """Lays the planes of a (size, size, planes) tensor out as a grid of tiles.

    Args:
        t: Input tensor.
        columns: Tiles per row.
        cell: Pixels per board point.
        spacing: Pixels between tiles.

    Returns:
        (np.ndarray): A uint8 gray image.

    """

    size, _, planes = t.shape
    side = size * cell
    rows = -(-planes // columns)

    out = np.full(
        (rows * (side + spacing) - spacing, columns * (side + spacing) - spacing),
        128,
        dtype=np.uint8,
    )

    for k in range(planes):
        r, col = divmod(k, columns)
        plane = t[:, :, k].astype(np.float32)
        if plane.max() > plane.min():
            plane = scl.unitary_scale(plane)
        tile = scl.upscale(np.clip(plane, 0, 1), cell)

        out[
            r * (side + spacing) : r * (side + spacing) + side,
            col * (side + spacing) : col * (side + spacing) + side,
        ] = (tile * 255).astype(np.uint8)

    return out


def create_mosaic(
    t: np.ndarray,
    columns: int = 7,
    cell: int = 8,
    spacing: int = 2,
    output: Optional[Union[str, Path]] = None,
) -> Image.Image:
    """Creates a mosaic of the input planes using Pillow.

    Args:
        t: A (size, size, planes) tensor.
        columns: Tiles per row.
        cell: Pixels per board point.
        spacing: Pixels between tiles.
        output: Image file to write.

    Returns:
        The mosaic.

    """

    if t.ndim != 3 or t.shape[0] != t.shape[1]:
        raise e.SizeError("`t` should be a (size, size, planes) tensor")
    if columns < 1:
        raise e.ValueError("`columns` should be >= 1")

    img = Image.fromarray(_rasterize(t, columns, cell, spacing))
    if output:
        img.save(output)

    return img
