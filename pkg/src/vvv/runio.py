"""Image ingestion and run-directory persistence.

Run layout, one directory per evaluated candidate:

    <root>/iter_<k>/cand_<code>/
        veni.png  vidi.png  vici.png      primary phase images
        <phase>_aux.csv                    profile / grid / threshold data
        <phase>_render.png                 chart renderings, when present
        manifest                           flat key/value text

Codes are serialized as decimal strings of arbitrary length; a code too
long for a directory name falls back to a truncated form with a digest
suffix.  Manifest writes are atomic (temp file, then rename).  With
multiple input images, files for image k > 0 carry a ``_<k>`` suffix.
"""

from __future__ import annotations

import hashlib
import io
import os
import re
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .codec import ParamSchema, PhaseShares, Settings
from .pipeline import ImageBuffer, quantize_u8

if TYPE_CHECKING:  # pragma: no cover
    from .explorer import Candidate

__all__ = [
    "UnsupportedFormatError",
    "CorruptImageError",
    "load_image",
    "save_image",
    "png_bytes",
    "save_outputs",
    "write_manifest",
    "read_manifest",
    "manifest_code_settings",
    "candidate_dirname",
    "parse_selection_script",
]

PHASES = ("veni", "vidi", "vici")


class UnsupportedFormatError(ValueError):
    """The file is readable but not a format this tool ingests."""


class CorruptImageError(ValueError):
    """The file claims a supported format but its contents are broken."""


# --- image ingestion ---------------------------------------------------------

_LUMA = (0.299, 0.587, 0.114)


def _luma(rgb: np.ndarray) -> np.ndarray:
    gray = _LUMA[0] * rgb[..., 0] + _LUMA[1] * rgb[..., 1] + _LUMA[2] * rgb[..., 2]
    return quantize_u8(gray)


def _load_png(path: Path) -> ImageBuffer:
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode == "L":
                return ImageBuffer(np.asarray(img, dtype=np.uint8))
            if mode in ("P", "PA"):
                img = img.convert("RGB")
                mode = "RGB"
            if mode in ("RGB", "RGBA", "LA"):
                rgb = np.asarray(img.convert("RGB") if mode != "RGB" else img, dtype=np.uint8)
                return ImageBuffer(_luma(rgb.astype(np.float64)))
            raise UnsupportedFormatError(f"{path}: unsupported PNG mode {mode!r} (8-bit only)")
    except UnidentifiedImageError as exc:
        raise CorruptImageError(f"{path}: not a decodable PNG") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, (UnsupportedFormatError, CorruptImageError)):
            raise
        raise CorruptImageError(f"{path}: broken PNG data ({exc})") from exc


_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _load_pgm(path: Path) -> ImageBuffer:
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise UnsupportedFormatError(f"{path}: only binary (P5) PGM is supported")
    pos = 2
    fields = []
    for _ in range(3):  # width, height, maxval; comments allowed between
        match = _PGM_TOKEN.match(data, pos)
        if not match:
            raise CorruptImageError(f"{path}: truncated PGM header")
        token = match.group(1)
        if not token.isdigit():
            raise CorruptImageError(f"{path}: bad PGM header token {token!r}")
        fields.append(int(token))
        pos = match.end()
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise CorruptImageError(f"{path}: bad PGM dimensions {width}x{height}")
    if maxval > 255:
        raise UnsupportedFormatError(f"{path}: PGM maxval {maxval} exceeds 8-bit range")
    if maxval < 1:
        raise CorruptImageError(f"{path}: bad PGM maxval {maxval}")
    pos += 1  # single whitespace byte separates header from raster
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise CorruptImageError(f"{path}: PGM raster shorter than {width}x{height}")
    return ImageBuffer(np.frombuffer(raster, dtype=np.uint8).reshape(height, width))


def load_image(path: Union[str, Path]) -> ImageBuffer:
    """Read a PNG or binary PGM into a grayscale buffer.

    Color PNGs collapse to luma (0.299 R + 0.587 G + 0.114 B, rounded
    half-up).  Distinct failures: FileNotFoundError,
    UnsupportedFormatError, CorruptImageError.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    header = path.open("rb").read(8)
    if header.startswith(b"\x89PNG"):
        return _load_png(path)
    if header.startswith(b"P5"):
        return _load_pgm(path)
    raise UnsupportedFormatError(f"{path}: not a PNG or binary PGM file")


def png_bytes(img: ImageBuffer) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(img.pixels, mode="L").save(buffer, format="PNG")
    return buffer.getvalue()


def save_image(path: Union[str, Path], img: ImageBuffer) -> None:
    """Write a grayscale image; format follows the extension (.png or .pgm)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".png":
        path.write_bytes(png_bytes(img))
    elif suffix == ".pgm":
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        path.write_bytes(header + img.pixels.tobytes())
    else:
        raise UnsupportedFormatError(f"{path}: can only write .png or .pgm")


# --- manifests and candidate directories -------------------------------------


def write_manifest(path: Union[str, Path], entries: Mapping[str, str]) -> Path:
    path = Path(path)
    body = "".join(f"{key}: {value}\n" for key, value in entries.items())
    temp = path.with_name(path.name + ".tmp")
    temp.write_text(body, encoding="utf-8")
    os.replace(temp, path)
    return path


def read_manifest(path: Union[str, Path]) -> dict[str, str]:
    entries: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition(": ")
        if not sep:
            raise CorruptImageError(f"{path}:{line_no}: not a 'key: value' line: {line!r}")
        entries[key] = value
    return entries


def manifest_code_settings(entries: Mapping[str, str]) -> tuple[int, Settings]:
    """Pull the code and index tuple back out of a manifest."""
    code = int(entries["code"])
    raw = entries["indices"].strip()
    settings = tuple(int(part) for part in raw.split(",")) if raw else ()
    return code, settings


def candidate_dirname(code: int) -> str:
    """`cand_<code>`, falling back to a digest form for oversized codes."""
    decimal = str(code)
    if len(decimal) <= 64:
        return f"cand_{decimal}"
    digest = hashlib.sha256(decimal.encode("ascii")).hexdigest()[:16]
    return f"cand_{decimal[:32]}_{digest}"


def _write_aux_csv(path: Path, aux) -> None:
    if isinstance(aux, np.ndarray) and aux.ndim == 2:
        lines = [",".join(str(v) for v in row) for row in aux.tolist()]
    elif isinstance(aux, np.ndarray):
        lines = [str(v) for v in aux.tolist()]
    else:
        lines = [str(aux)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _suffix(image_index: int) -> str:
    return "" if image_index == 0 else f"_{image_index}"


def save_outputs(
    candidate: "Candidate",
    directory: Union[str, Path],
    *,
    stage_ids: Sequence[str],
    schemas: Sequence[ParamSchema],
    shares: PhaseShares,
    iteration: int,
    stamp: str,
) -> Path:
    """Persist a feasible candidate's phase outputs and manifest.

    Returns the manifest path.  Re-reading the manifest reproduces the
    candidate's code and settings exactly.
    """
    if candidate.settings is None or candidate.outputs is None:
        raise ValueError(f"candidate {candidate.code} has no outputs to save")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for image_index, triple in enumerate(candidate.outputs):
        for phase, output in zip(PHASES, triple):
            tag = f"{phase}{_suffix(image_index)}"
            save_image(directory / f"{tag}.png", output.image)
            if output.aux is not None:
                _write_aux_csv(directory / f"{tag}_aux.csv", output.aux)
            if output.rendering is not None:
                save_image(directory / f"{tag}_render.png", output.rendering)
    entries: dict[str, str] = {
        "code": str(candidate.code),
        "iteration": str(iteration),
        "shares": ",".join(str(s) for s in shares.as_tuple()),
        "indices": ",".join(str(i) for i in candidate.settings),
    }
    for phase, stage_id in zip(PHASES, stage_ids):
        entries[f"stage.{phase}"] = stage_id
    for schema, index in zip(schemas, candidate.settings):
        entries[f"param.{schema.name}"] = str(schema.value(index))
    entries["saved_at"] = stamp
    return write_manifest(directory / "manifest", entries)


def parse_selection_script(text: str) -> list[Union[int, None]]:
    """One selection per line: a decimal code, or NONE to stop."""
    selections: list[Union[int, None]] = []
    for line_no, line in enumerate(text.splitlines(), 1):
        token = line.strip()
        if not token or token.startswith("#"):
            continue
        if token.upper() == "NONE":
            selections.append(None)
        elif token.lstrip("-").isdigit():
            value = int(token)
            if value < 0:
                raise ValueError(f"line {line_no}: selection codes are non-negative, got {token}")
            selections.append(value)
        else:
            raise ValueError(f"line {line_no}: expected a code or NONE, got {token!r}")
    return selections
