"""Three-phase image pipeline: veni filters, vidi visualizes, vici segments.

Stages are pure functions of (image, parameters).  Image samples are
8-bit, but all filter math runs in float64 and is only clamped to
[0, 255] and rounded half-up when an image is stored.  Convolutions
reflect the image at its borders (edge pixel included), which preserves
constants and keeps means stable.

A phase that should do nothing uses the ``identity`` stage.  Pure
visualization stages (``plot_profile``, ``surface_grid``) pass the
image through unchanged as their primary output and attach their data
and a rendered chart as auxiliaries, so the next phase always receives
a valid image.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .codec import ParamSchema

__all__ = [
    "ImageBuffer",
    "Phase",
    "StageDescriptor",
    "PhaseOutput",
    "PipelineError",
    "DegenerateImageError",
    "quantize_u8",
    "gaussian_blur",
    "sobel_edges",
    "otsu_threshold",
    "fixed_threshold",
    "plot_profile",
    "surface_grid",
    "run_pipeline",
    "get_stage",
    "list_stages",
    "register_stage",
    "make_descriptor",
]


class DegenerateImageError(ValueError):
    """Raised when an operation needs structure the image does not have."""


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half-up into uint8."""
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


class ImageBuffer:
    """2-D grayscale raster; row-major uint8 samples, immutable."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 2:
            raise ValueError(f"image must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image dimensions must be positive, got {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"samples must be integers, got dtype {arr.dtype}")
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("integer samples outside [0, 255]")
            arr = arr.astype(np.uint8)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ImageBuffer is immutable")

    @classmethod
    def from_float(cls, values: np.ndarray) -> "ImageBuffer":
        """Build a buffer from real-valued working data (clamp + round half-up)."""
        return cls(quantize_u8(values))

    @classmethod
    def constant(cls, width: int, height: int, value: int) -> "ImageBuffer":
        return cls(np.full((height, width), value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def samples(self) -> np.ndarray:
        """Row-major flat view of the samples."""
        return self.pixels.reshape(-1)

    def as_float(self) -> np.ndarray:
        return self.pixels.astype(np.float64)

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"ImageBuffer({self.width}x{self.height})"


class Phase(enum.Enum):
    VENI = "veni"
    VIDI = "vidi"
    VICI = "vici"
    IDENTITY = "identity"


#: Auxiliary phase data: a 1-D series, a 2-D grid, or a scalar.
Aux = Union[np.ndarray, float, None]


@dataclass(frozen=True, eq=False)
class PhaseOutput:
    """What one phase emits: always a primary image, optionally more.

    ``aux`` holds measurement data (profile series, surface grid,
    threshold value); ``rendering`` holds a chart image of that data
    for the gallery.
    """

    image: ImageBuffer
    aux: Aux = None
    rendering: Optional[ImageBuffer] = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhaseOutput):
            return NotImplemented
        if self.image != other.image or self.rendering != other.rendering:
            return False
        if isinstance(self.aux, np.ndarray) or isinstance(other.aux, np.ndarray):
            return (
                isinstance(self.aux, np.ndarray)
                and isinstance(other.aux, np.ndarray)
                and self.aux.shape == other.aux.shape
                and bool(np.array_equal(self.aux, other.aux))
            )
        return self.aux == other.aux


class PipelineError(RuntimeError):
    """A stage failed; carries the phase and stage that raised."""

    def __init__(self, phase: str, stage_id: str, cause: Exception):
        super().__init__(f"{phase} stage {stage_id!r} failed: {cause}")
        self.phase = phase
        self.stage_id = stage_id
        self.cause = cause


# --- filters -----------------------------------------------------------------


def _convolve_separable(data: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve rows then columns with a 1-D kernel, reflecting at borders."""
    radius = len(kernel) // 2
    out = np.pad(data, ((0, 0), (radius, radius)), mode="symmetric")
    out = sum(weight * out[:, i : i + data.shape[1]] for i, weight in enumerate(kernel))
    out = np.pad(out, ((radius, radius), (0, 0)), mode="symmetric")
    return sum(weight * out[i : i + data.shape[0], :] for i, weight in enumerate(kernel))


def gaussian_blur(img: ImageBuffer, sigma: float) -> ImageBuffer:
    """Separable Gaussian blur; kernel radius ceil(3*sigma), reflect borders."""
    if not 0 < sigma <= 16:
        raise ValueError(f"sigma must be in (0, 16], got {sigma}")
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2 * sigma * sigma))
    kernel /= kernel.sum()
    return ImageBuffer.from_float(_convolve_separable(img.as_float(), kernel))


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)


def sobel_edges(img: ImageBuffer) -> ImageBuffer:
    """Gradient magnitude from the 3x3 Sobel kernels, reflect borders."""
    if img.width < 3 or img.height < 3:
        raise ValueError(f"image must be at least 3x3, got {img.width}x{img.height}")
    padded = np.pad(img.as_float(), 1, mode="symmetric")
    h, w = img.height, img.width
    gx = np.zeros((h, w), dtype=np.float64)
    gy = np.zeros((h, w), dtype=np.float64)
    for di in range(3):
        for dj in range(3):
            window = padded[di : di + h, dj : dj + w]
            gx += _SOBEL_X[di, dj] * window
            gy += _SOBEL_X[dj, di] * window
    return ImageBuffer.from_float(np.sqrt(gx * gx + gy * gy))


def otsu_threshold(img: ImageBuffer) -> tuple[int, ImageBuffer]:
    """Split the histogram at the threshold maximizing between-class variance.

    The objective is w0 * w1 * (mu0 - mu1)**2 over thresholds t in
    [0, 255] with classes {<= t} and {> t}; ties break to the smallest
    t.  Comparisons run in exact integer arithmetic, so the argmax is
    never at the mercy of float rounding.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256)
    if int(np.count_nonzero(hist)) < 2:
        raise DegenerateImageError("image has a single intensity; no two classes exist")
    counts = hist.cumsum()
    sums = (hist * np.arange(256)).cumsum()
    total_n = int(counts[-1])
    total_s = int(sums[-1])
    best_t = -1
    best_num = 0  # scaled objective numerator: (s0*n1 - s1*n0)**2
    best_den = 1  # ... over n0*n1 (the constant 1/N**2 cancels)
    for t in range(256):
        n0 = int(counts[t])
        n1 = total_n - n0
        if n0 == 0 or n1 == 0:
            continue
        s0 = int(sums[t])
        s1 = total_s - s0
        num = (s0 * n1 - s1 * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t, fixed_threshold(img, best_t)


def fixed_threshold(img: ImageBuffer, t: int) -> ImageBuffer:
    """Binary image: 255 where intensity > t, else 0."""
    if not 0 <= t <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {t}")
    return ImageBuffer(np.where(img.pixels > t, 255, 0).astype(np.uint8))


def plot_profile(img: ImageBuffer, row: int) -> np.ndarray:
    """Intensities of one row, as a float series of length width."""
    if not 0 <= row < img.height:
        raise ValueError(f"row {row} outside [0, {img.height})")
    return img.pixels[row].astype(np.float64)


def surface_grid(img: ImageBuffer, downsample: int) -> np.ndarray:
    """Block-mean height grid of size ceil(h/d) x ceil(w/d)."""
    if downsample < 1:
        raise ValueError(f"downsample must be >= 1, got {downsample}")
    d = int(downsample)
    data = img.as_float()
    row_starts = np.arange(0, img.height, d)
    col_starts = np.arange(0, img.width, d)
    block_sums = np.add.reduceat(np.add.reduceat(data, row_starts, axis=0), col_starts, axis=1)
    row_sizes = np.minimum(row_starts + d, img.height) - row_starts
    col_sizes = np.minimum(col_starts + d, img.width) - col_starts
    return block_sums / np.outer(row_sizes, col_sizes)


# --- chart renderings --------------------------------------------------------


def render_profile_chart(series: np.ndarray) -> ImageBuffer:
    """Rasterize a profile as a 256-tall polyline chart (dark on white)."""
    width = len(series)
    chart = np.full((256, max(width, 1)), 255, dtype=np.uint8)
    ys = 255 - quantize_u8(series).astype(int)
    for x in range(width):
        y_prev = ys[x - 1] if x > 0 else ys[x]
        lo, hi = min(y_prev, ys[x]), max(y_prev, ys[x])
        chart[lo : hi + 1, x] = 0
    return ImageBuffer(chart)


def render_surface_shading(grid: np.ndarray) -> ImageBuffer:
    """Shade a height grid as if lit from the upper left."""
    z = np.asarray(grid, dtype=np.float64)
    span = z.max() - z.min()
    z = (z - z.min()) / span if span > 0 else np.zeros_like(z)
    if z.shape[0] > 1 or z.shape[1] > 1:
        gy, gx = np.gradient(z)
    else:
        gy = gx = np.zeros_like(z)
    scale = 8.0  # exaggerate relief so small gradients stay visible
    norm = np.sqrt(scale * scale * (gx * gx + gy * gy) + 1.0)
    light = np.array([-1.0, -1.0, 1.0]) / np.sqrt(3.0)
    shade = (-scale * gx * light[0] - scale * gy * light[1] + light[2]) / norm
    return ImageBuffer.from_float(np.clip(shade, 0.0, 1.0) * 255.0)


# --- stage registry ----------------------------------------------------------


@dataclass(frozen=True)
class StageDef:
    """A registered stage: identity, phase taxonomy, grids, and behavior."""

    id: str
    phase: Phase
    default_schemas: tuple[ParamSchema, ...]
    apply: Callable[[ImageBuffer, Sequence[float]], PhaseOutput]


@dataclass(frozen=True)
class StageDescriptor:
    """A stage bound to the concrete parameter grids a session will use.

    Parameter order is fixed: it is the order of ``schemas``, and the
    configuration codes depend on it.
    """

    stage_id: str
    phase: Phase
    schemas: tuple[ParamSchema, ...] = field(default_factory=tuple)

    @property
    def arity(self) -> int:
        return len(self.schemas)


_REGISTRY: dict[str, StageDef] = {}


def register_stage(stage: StageDef) -> StageDef:
    if stage.id in _REGISTRY:
        raise ValueError(f"stage {stage.id!r} already registered")
    _REGISTRY[stage.id] = stage
    return stage


def get_stage(stage_id: str) -> StageDef:
    try:
        return _REGISTRY[stage_id]
    except KeyError:
        raise KeyError(f"unknown stage {stage_id!r}; known: {sorted(_REGISTRY)}") from None


def list_stages() -> list[StageDef]:
    return [_REGISTRY[k] for k in sorted(_REGISTRY)]


def make_descriptor(
    stage_id: str, schemas: Optional[Sequence[ParamSchema]] = None
) -> StageDescriptor:
    """Bind a registered stage to explicit grids (defaults when omitted)."""
    stage = get_stage(stage_id)
    bound = tuple(schemas) if schemas is not None else stage.default_schemas
    if len(bound) != len(stage.default_schemas):
        raise ValueError(
            f"stage {stage_id!r} takes {len(stage.default_schemas)} parameters, "
            f"got {len(bound)} schemas"
        )
    return StageDescriptor(stage_id=stage.id, phase=stage.phase, schemas=bound)


def _as_int(value: float, label: str) -> int:
    rounded = round(value)
    if abs(value - rounded) > 1e-9:
        raise ValueError(f"{label} must be an integer grid value, got {value}")
    return int(rounded)


register_stage(
    StageDef(
        id="identity",
        phase=Phase.IDENTITY,
        default_schemas=(),
        apply=lambda img, values: PhaseOutput(image=img),
    )
)

register_stage(
    StageDef(
        id="gaussian_blur",
        phase=Phase.VENI,
        default_schemas=(ParamSchema("sigma", min=0.5, step=0.5, count=8),),
        apply=lambda img, values: PhaseOutput(image=gaussian_blur(img, values[0])),
    )
)

register_stage(
    StageDef(
        id="sobel_edges",
        phase=Phase.VENI,
        default_schemas=(),
        apply=lambda img, values: PhaseOutput(image=sobel_edges(img)),
    )
)


def _apply_plot_profile(img: ImageBuffer, values: Sequence[float]) -> PhaseOutput:
    series = plot_profile(img, _as_int(values[0], "row"))
    return PhaseOutput(image=img, aux=series, rendering=render_profile_chart(series))


register_stage(
    StageDef(
        id="plot_profile",
        phase=Phase.VIDI,
        default_schemas=(ParamSchema("row", min=0, step=1, count=16),),
        apply=_apply_plot_profile,
    )
)


def _apply_surface_grid(img: ImageBuffer, values: Sequence[float]) -> PhaseOutput:
    grid = surface_grid(img, _as_int(values[0], "downsample"))
    return PhaseOutput(image=img, aux=grid, rendering=render_surface_shading(grid))


register_stage(
    StageDef(
        id="surface_grid",
        phase=Phase.VIDI,
        default_schemas=(ParamSchema("downsample", min=1, step=1, count=4),),
        apply=_apply_surface_grid,
    )
)


def _apply_otsu(img: ImageBuffer, values: Sequence[float]) -> PhaseOutput:
    threshold, binary = otsu_threshold(img)
    return PhaseOutput(image=binary, aux=float(threshold))


register_stage(
    StageDef(id="otsu_threshold", phase=Phase.VICI, default_schemas=(), apply=_apply_otsu)
)

register_stage(
    StageDef(
        id="fixed_threshold",
        phase=Phase.VICI,
        default_schemas=(ParamSchema("threshold", min=0, step=16, count=16),),
        apply=lambda img, values: PhaseOutput(
            image=fixed_threshold(img, _as_int(values[0], "threshold"))
        ),
    )
)


# --- the three-phase run -----------------------------------------------------


def run_pipeline(
    img: ImageBuffer,
    settings: tuple[int, ...],
    stages: tuple[StageDescriptor, StageDescriptor, StageDescriptor],
) -> tuple[PhaseOutput, PhaseOutput, PhaseOutput]:
    """Apply veni, vidi, vici in order, threading the primary image through.

    ``settings`` holds grid indices for all three stages' parameters in
    declaration order.  Stage failures surface as
    :class:`PipelineError` tagged with the failing phase.
    """
    arities = [stage.arity for stage in stages]
    if len(settings) != sum(arities):
        raise ValueError(
            f"settings have {len(settings)} indices but stages declare {sum(arities)}"
        )
    outputs = []
    current = img
    offset = 0
    for phase_name, stage in zip(("veni", "vidi", "vici"), stages):
        indices = settings[offset : offset + stage.arity]
        offset += stage.arity
        values = [schema.value(i) for schema, i in zip(stage.schemas, indices)]
        try:
            result = get_stage(stage.stage_id).apply(current, values)
        except Exception as exc:
            raise PipelineError(phase_name, stage.stage_id, exc) from exc
        outputs.append(result)
        current = result.image
    return tuple(outputs)
