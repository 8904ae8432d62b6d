"""Run configuration: file schema, validation, session assembly.

A run configuration is a YAML mapping (the service accepts the same
shape as a JSON body):

    mode: batch                 # or serve
    images: [sample.png]        # >= 1 path, relative to the config file
    output_root: runs/demo
    range: 6                    # window breadth: range + 1 codes
    shares: [1, 1, 1]           # parameters per phase; must match stages
    defaults: [0, 0, 0]         # start indices (default: all zeros)
    stages:
      veni: gaussian_blur
      vidi: surface_grid
      vici: fixed_threshold
    parameters:                 # optional grid overrides per stage
      gaussian_blur:
        sigma: {min: 0.5, step: 0.5, count: 8}
    selections: walk.txt        # optional, batch mode
    pause_timeout_seconds: 30   # optional, serve mode
    feasible_fill: false        # optional extension
    deterministic_timestamps: true   # default: true in batch, false in serve

Validation gathers every violation before failing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import yaml

from .codec import ParamSchema, PhaseShares, Settings, check_settings
from .explorer import SessionConfig, ValidationError
from .pipeline import Phase, StageDescriptor, get_stage, make_descriptor
from .runio import load_image

__all__ = ["ConfigError", "RunConfig", "parse_config", "build_run_config", "to_session_config"]

MODES = ("batch", "serve")


class ConfigError(ValidationError):
    """A run configuration that cannot be used, with all reasons listed."""


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration; paths resolved, images not yet loaded."""

    images: tuple[Path, ...]
    stages: tuple[StageDescriptor, StageDescriptor, StageDescriptor]
    shares: PhaseShares
    defaults: Settings
    window_range: int
    output_root: Path
    mode: str = "batch"
    selections_path: Optional[Path] = None
    pause_timeout_seconds: Optional[float] = None
    feasible_fill: bool = False
    deterministic_stamps: Optional[bool] = None  # None: decided by mode


def parse_config(path: Union[str, Path]) -> RunConfig:
    """Load and validate a YAML run configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        location = ""
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            location = f" at line {mark.line + 1}, column {mark.column + 1}"
        raise ConfigError([f"{path}: YAML parse error{location}: {exc}"]) from exc
    if not isinstance(data, Mapping):
        raise ConfigError([f"{path}: configuration must be a mapping, got {type(data).__name__}"])
    return build_run_config(data, base_dir=path.parent)


def _parse_schema(stage_id: str, name: str, raw, errors: list[str]) -> Optional[ParamSchema]:
    if not isinstance(raw, Mapping):
        errors.append(f"parameters.{stage_id}.{name}: expected a mapping with min/step/count")
        return None
    unknown = set(raw) - {"min", "step", "count"}
    if unknown:
        errors.append(f"parameters.{stage_id}.{name}: unknown keys {sorted(unknown)}")
    try:
        return ParamSchema(
            name=name,
            min=float(raw.get("min", 0.0)),
            step=float(raw.get("step", 1.0)),
            count=int(raw.get("count", 1)),
        )
    except (TypeError, ValueError) as exc:
        errors.append(f"parameters.{stage_id}.{name}: {exc}")
        return None


def _build_stage(
    phase_name: str,
    stage_id,
    overrides: Mapping,
    errors: list[str],
) -> Optional[StageDescriptor]:
    if not isinstance(stage_id, str):
        errors.append(f"stages.{phase_name}: expected a stage id string, got {stage_id!r}")
        return None
    try:
        stage = get_stage(stage_id)
    except KeyError as exc:
        errors.append(f"stages.{phase_name}: {exc.args[0]}")
        return None
    if stage.phase is not Phase.IDENTITY and stage.phase.value != phase_name:
        errors.append(
            f"stages.{phase_name}: stage {stage_id!r} belongs to the "
            f"{stage.phase.value} phase"
        )
        return None
    stage_overrides = overrides.get(stage_id, {})
    if not isinstance(stage_overrides, Mapping):
        errors.append(f"parameters.{stage_id}: expected a mapping of parameter names")
        stage_overrides = {}
    known_names = {schema.name for schema in stage.default_schemas}
    for name in stage_overrides:
        if name not in known_names:
            errors.append(
                f"parameters.{stage_id}: stage has no parameter {name!r} "
                f"(has: {sorted(known_names)})"
            )
    schemas = []
    for schema in stage.default_schemas:
        if schema.name in stage_overrides:
            parsed = _parse_schema(stage_id, schema.name, stage_overrides[schema.name], errors)
            if parsed is None:
                return None
            schemas.append(parsed)
        else:
            schemas.append(schema)
    return make_descriptor(stage_id, schemas)


def _parse_shares(raw, errors: list[str]) -> Optional[PhaseShares]:
    if isinstance(raw, Mapping):
        values = [raw.get(k) for k in ("a", "b", "c")]
    elif isinstance(raw, Sequence) and not isinstance(raw, str):
        values = list(raw)
    else:
        errors.append(f"shares: expected [a, b, c] or {{a, b, c}}, got {raw!r}")
        return None
    if len(values) != 3 or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        errors.append(f"shares: expected three integers, got {raw!r}")
        return None
    try:
        return PhaseShares(*values)
    except ValueError as exc:
        errors.append(f"shares: {exc}")
        return None


def build_run_config(data: Mapping, base_dir: Union[str, Path, None] = None) -> RunConfig:
    """Validate a raw mapping (from YAML or a request body) into a RunConfig."""
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    errors: list[str] = []

    known_keys = {
        "mode",
        "images",
        "output_root",
        "range",
        "shares",
        "defaults",
        "stages",
        "parameters",
        "selections",
        "pause_timeout_seconds",
        "feasible_fill",
        "deterministic_timestamps",
    }
    for key in set(data) - known_keys:
        errors.append(f"unknown configuration key {key!r}")

    mode = data.get("mode", "batch")
    if mode not in MODES:
        errors.append(f"mode: expected one of {MODES}, got {mode!r}")

    raw_images = data.get("images")
    images: tuple[Path, ...] = ()
    if not isinstance(raw_images, Sequence) or isinstance(raw_images, str) or not raw_images:
        errors.append("images: expected a non-empty list of paths")
    else:
        images = tuple(base / str(p) for p in raw_images)

    overrides = data.get("parameters", {})
    if not isinstance(overrides, Mapping):
        errors.append("parameters: expected a mapping keyed by stage id")
        overrides = {}
    raw_stages = data.get("stages")
    stages: list[Optional[StageDescriptor]] = [None, None, None]
    if not isinstance(raw_stages, Mapping):
        errors.append("stages: expected a mapping with veni/vidi/vici entries")
    else:
        for key in set(raw_stages) - {"veni", "vidi", "vici"}:
            errors.append(f"stages: unknown phase {key!r}")
        for slot, phase_name in enumerate(("veni", "vidi", "vici")):
            stages[slot] = _build_stage(
                phase_name, raw_stages.get(phase_name, "identity"), overrides, errors
            )

    if isinstance(raw_stages, Mapping) and isinstance(overrides, Mapping):
        used_ids = {s.stage_id for s in stages if s is not None}
        for stage_id in set(overrides) - used_ids:
            errors.append(f"parameters: stage {stage_id!r} is not used by any phase")

    shares = _parse_shares(data.get("shares"), errors)

    window_range = data.get("range")
    if not isinstance(window_range, int) or isinstance(window_range, bool) or window_range < 1:
        errors.append(f"range: expected a positive integer, got {window_range!r}")
        window_range = 1

    raw_root = data.get("output_root")
    if not isinstance(raw_root, str) or not raw_root:
        errors.append("output_root: expected a path")
        output_root = base / "runs"
    else:
        output_root = base / raw_root

    n_params = sum(s.arity for s in stages if s is not None)
    raw_defaults = data.get("defaults")
    if raw_defaults is None:
        defaults: Settings = tuple([0] * n_params)
    elif isinstance(raw_defaults, Sequence) and not isinstance(raw_defaults, str) and all(
        isinstance(v, int) and not isinstance(v, bool) for v in raw_defaults
    ):
        defaults = tuple(raw_defaults)
    else:
        errors.append(f"defaults: expected a list of integer indices, got {raw_defaults!r}")
        defaults = tuple([0] * n_params)

    selections_path = None
    if data.get("selections") is not None:
        selections_path = base / str(data["selections"])

    pause = data.get("pause_timeout_seconds")
    if pause is not None and (not isinstance(pause, (int, float)) or pause <= 0):
        errors.append(f"pause_timeout_seconds: expected a positive number, got {pause!r}")
        pause = None

    feasible_fill = data.get("feasible_fill", False)
    if not isinstance(feasible_fill, bool):
        errors.append(f"feasible_fill: expected true or false, got {feasible_fill!r}")
        feasible_fill = False

    stamps = data.get("deterministic_timestamps")
    if stamps is not None and not isinstance(stamps, bool):
        errors.append(f"deterministic_timestamps: expected true or false, got {stamps!r}")
        stamps = None

    # Cross-checks between shares, stages, and defaults mirror the
    # session validation but are reported at parse time, together.
    if shares is not None and all(s is not None for s in stages):
        for phase_name, stage, share in zip(("veni", "vidi", "vici"), stages, shares.as_tuple()):
            if stage.arity != share:
                errors.append(
                    f"shares: {phase_name} share is {share} but stage "
                    f"{stage.stage_id!r} declares {stage.arity} parameters"
                )
    if all(s is not None for s in stages):
        if len(defaults) != n_params:
            errors.append(
                f"defaults: {len(defaults)} indices for {n_params} declared parameters"
            )
        else:
            schemas = tuple(schema for stage in stages for schema in stage.schemas)
            for problem in check_settings(defaults, schemas):
                errors.append(f"defaults: {problem}")

    if errors or any(s is None for s in stages) or shares is None:
        raise ConfigError(errors)

    return RunConfig(
        images=images,
        stages=(stages[0], stages[1], stages[2]),
        shares=shares,
        defaults=defaults,
        window_range=window_range,
        output_root=output_root,
        mode=mode,
        selections_path=selections_path,
        pause_timeout_seconds=float(pause) if pause is not None else None,
        feasible_fill=feasible_fill,
        deterministic_stamps=stamps,
    )


def to_session_config(
    run_config: RunConfig, output_root: Union[str, Path, None] = None
) -> SessionConfig:
    """Load the input images and assemble the explorer's configuration.

    Batch runs default to deterministic manifest timestamps so reruns
    are bit-identical; serve mode defaults to wall-clock stamps.
    """
    images = tuple(load_image(path) for path in run_config.images)
    stamps = run_config.deterministic_stamps
    if stamps is None:
        stamps = run_config.mode == "batch"
    root = Path(output_root) if output_root is not None else run_config.output_root
    return SessionConfig(
        stages=run_config.stages,
        shares=run_config.shares,
        defaults=run_config.defaults,
        window_range=run_config.window_range,
        images=images,
        output_root=root,
        pause_timeout=run_config.pause_timeout_seconds,
        feasible_fill=run_config.feasible_fill,
        deterministic_stamps=stamps,
    )
