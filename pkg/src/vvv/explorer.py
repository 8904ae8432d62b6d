"""The steering loop as a deterministic state machine.

Each iteration: encode the current settings to their code, enumerate
the integer window around it, decode every code into a candidate, run
the pipeline for each feasible candidate, then wait for a selection.
A selection re-centers the loop on the chosen candidate's settings; a
None selection terminates with the current settings.

States are immutable; applying a selection returns a new, fully
evaluated state.  Replaying a recorded history therefore reproduces a
session exactly, which is what the batch runner does.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Optional, Sequence, Union

from .codec import (
    Infeasible,
    ParamSchema,
    PhaseShares,
    Settings,
    check_settings,
    decode_config,
    encode_config,
    settings_values,
)
from .pipeline import ImageBuffer, PhaseOutput, PipelineError, StageDescriptor, run_pipeline
from .runio import candidate_dirname, save_outputs

__all__ = [
    "ValidationError",
    "SelectionError",
    "SessionConfig",
    "Candidate",
    "SessionState",
    "Terminated",
    "BatchResult",
    "init_session",
    "enumerate_window",
    "evaluate_window",
    "apply_selection",
    "run_batch",
    "state_summary",
]

PipelineTriple = tuple[PhaseOutput, PhaseOutput, PhaseOutput]


class ValidationError(ValueError):
    """One or more constraint violations, all reported together."""

    def __init__(self, errors: Sequence[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


class SelectionError(ValueError):
    """The requested selection is not an acceptable candidate."""


@dataclass(frozen=True)
class SessionConfig:
    """Everything a session needs to run, validated by :func:`init_session`."""

    stages: tuple[StageDescriptor, StageDescriptor, StageDescriptor]
    shares: PhaseShares
    defaults: Settings
    window_range: int
    images: tuple[ImageBuffer, ...]
    output_root: Optional[Path] = None
    pause_timeout: Optional[float] = None
    feasible_fill: bool = False
    deterministic_stamps: bool = True

    @property
    def schemas(self) -> tuple[ParamSchema, ...]:
        return tuple(schema for stage in self.stages for schema in stage.schemas)


@dataclass(frozen=True)
class Candidate:
    """One decoded code in a window, with its outputs when it could run."""

    code: int
    settings: Optional[Settings] = None
    infeasible_reason: Optional[str] = None
    outputs: Optional[tuple[PipelineTriple, ...]] = None  # one triple per input image
    output_dir: Optional[Path] = None
    error: Optional[str] = None

    @property
    def feasible(self) -> bool:
        return self.settings is not None

    @property
    def selectable(self) -> bool:
        return self.feasible and self.error is None


@dataclass(frozen=True)
class SessionState:
    config: SessionConfig
    iteration: int
    settings: Settings
    window: tuple[Candidate, ...] = ()
    history: tuple[tuple[int, int], ...] = ()

    @property
    def current_code(self) -> int:
        return encode_config(self.settings, self.config.shares)


@dataclass(frozen=True)
class Terminated:
    """The loop has ended; the final settings are the last confirmed ones."""

    config: SessionConfig
    final_settings: Settings
    history: tuple[tuple[int, int], ...]
    iteration: int


@dataclass(frozen=True)
class BatchResult:
    states: tuple[SessionState, ...]
    terminal: Optional[Terminated] = None

    @property
    def final_settings(self) -> Settings:
        return self.terminal.final_settings if self.terminal else self.states[-1].settings


def init_session(config: SessionConfig) -> SessionState:
    """Validate a configuration and return the iteration-0 state.

    Every violated constraint is reported, not just the first.
    """
    errors: list[str] = []
    schemas = config.schemas
    for phase_name, stage, share in zip(
        ("veni", "vidi", "vici"), config.stages, config.shares.as_tuple()
    ):
        if stage.arity != share:
            errors.append(
                f"{phase_name} share is {share} but stage {stage.stage_id!r} "
                f"declares {stage.arity} parameters"
            )
    if config.shares.total != len(schemas):
        errors.append(
            f"shares sum to {config.shares.total} but {len(schemas)} parameters are declared"
        )
    if config.window_range < 1:
        errors.append(f"range must be a positive integer, got {config.window_range}")
    if not config.images:
        errors.append("at least one input image is required")
    if config.pause_timeout is not None and config.pause_timeout <= 0:
        errors.append(f"pause timeout must be positive, got {config.pause_timeout}")
    if len(config.defaults) == len(schemas):
        errors.extend(check_settings(config.defaults, schemas))
    else:
        errors.append(
            f"default settings have {len(config.defaults)} indices "
            f"but {len(schemas)} parameters are declared"
        )
    if errors:
        raise ValidationError(errors)
    return SessionState(config=config, iteration=0, settings=tuple(config.defaults))


def enumerate_window(code: int, window_range: int) -> list[int]:
    """Codes from max(0, code - range//2) to code + range//2, ascending."""
    if code < 0 or window_range < 0:
        raise ValueError("code and range must be non-negative")
    half = window_range // 2
    return list(range(max(0, code - half), code + half + 1))


def _feasible_fill_codes(state: SessionState, center: int) -> list[int]:
    # Extension, off by default: scan upward from the window's lower
    # bound, keeping only feasible codes, until the window is full or
    # the scan cap is reached.  The center code is always included.
    config = state.config
    schemas = config.schemas
    cap = 10 * config.window_range * max(schema.count for schema in schemas)
    codes = {center}
    z = max(0, center - config.window_range // 2)
    scanned = 0
    while len(codes) < config.window_range + 1 and scanned < cap:
        if z != center:
            if not isinstance(decode_config(z, config.shares, schemas), Infeasible):
                codes.add(z)
        z += 1
        scanned += 1
    return sorted(codes)


def _stamp(config: SessionConfig, iteration: int) -> str:
    if config.deterministic_stamps:
        # Logical clock: reruns of the same session produce identical
        # run directories, byte for byte.
        moment = datetime(1970, 1, 1, tzinfo=timezone.utc) + timedelta(seconds=iteration)
    else:
        moment = datetime.now(timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def _evaluate_candidate(state: SessionState, code: int) -> Candidate:
    config = state.config
    decoded = decode_config(code, config.shares, config.schemas)
    if isinstance(decoded, Infeasible):
        return Candidate(code=code, infeasible_reason=decoded.reason)
    try:
        outputs = tuple(run_pipeline(img, decoded, config.stages) for img in config.images)
    except PipelineError as exc:
        return Candidate(code=code, settings=decoded, error=str(exc))
    candidate = Candidate(code=code, settings=decoded, outputs=outputs)
    if config.output_root is not None:
        directory = (
            Path(config.output_root) / f"iter_{state.iteration}" / candidate_dirname(code)
        )
        save_outputs(
            candidate,
            directory,
            stage_ids=[stage.stage_id for stage in config.stages],
            schemas=config.schemas,
            shares=config.shares,
            iteration=state.iteration,
            stamp=_stamp(config, state.iteration),
        )
        candidate = replace(candidate, output_dir=directory)
    return candidate


def evaluate_window(state: SessionState) -> SessionState:
    """Decode and run every candidate around the current settings' code."""
    center = state.current_code
    if state.config.feasible_fill:
        codes = _feasible_fill_codes(state, center)
    else:
        codes = enumerate_window(center, state.config.window_range)
    window = tuple(_evaluate_candidate(state, code) for code in codes)
    return replace(state, window=window)


def apply_selection(
    state: SessionState, selection: Optional[int]
) -> Union[SessionState, Terminated]:
    """Re-center on the chosen candidate, or terminate on None.

    Only feasible, successfully evaluated candidates in the current
    window are selectable.
    """
    if selection is None:
        return Terminated(
            config=state.config,
            final_settings=state.settings,
            history=state.history,
            iteration=state.iteration,
        )
    chosen = next((c for c in state.window if c.code == selection), None)
    if chosen is None:
        raise SelectionError(f"code {selection} is not in the current window")
    if not chosen.feasible:
        raise SelectionError(f"code {selection} is infeasible: {chosen.infeasible_reason}")
    if chosen.error is not None:
        raise SelectionError(f"code {selection} failed to evaluate: {chosen.error}")
    next_state = SessionState(
        config=state.config,
        iteration=state.iteration + 1,
        settings=chosen.settings,
        history=state.history + ((state.iteration, selection),),
    )
    return evaluate_window(next_state)


def run_batch(config: SessionConfig, selections: Sequence[Optional[int]]) -> BatchResult:
    """Replay a selection list headlessly; returns every intermediate state."""
    state = evaluate_window(init_session(config))
    states = [state]
    terminal: Optional[Terminated] = None
    for step, selection in enumerate(selections):
        if terminal is not None:
            raise SelectionError(f"step {step}: selection after the session terminated")
        try:
            outcome = apply_selection(state, selection)
        except SelectionError as exc:
            raise SelectionError(f"step {step}: {exc}") from exc
        if isinstance(outcome, Terminated):
            terminal = outcome
        else:
            state = outcome
            states.append(state)
    return BatchResult(states=tuple(states), terminal=terminal)


def state_summary(state: SessionState) -> dict:
    """A plain-data snapshot of a state; codes travel as decimal strings."""
    schemas = state.config.schemas
    center = state.current_code

    def describe(candidate: Candidate) -> dict:
        entry: dict = {
            "code": str(candidate.code),
            "is_current": candidate.code == center,
        }
        if candidate.feasible:
            entry["status"] = "error" if candidate.error else "feasible"
            entry["indices"] = list(candidate.settings)
            entry["values"] = {
                schema.name: value
                for schema, value in zip(schemas, settings_values(candidate.settings, schemas))
            }
            if candidate.error:
                entry["reason"] = candidate.error
        else:
            entry["status"] = "infeasible"
            entry["reason"] = candidate.infeasible_reason
        return entry

    return {
        "iteration": state.iteration,
        "code": str(center),
        "indices": list(state.settings),
        "values": {
            schema.name: value
            for schema, value in zip(schemas, settings_values(state.settings, schemas))
        },
        "shares": list(state.config.shares.as_tuple()),
        "window": [describe(c) for c in state.window],
        "history": [[iteration, str(code)] for iteration, code in state.history],
    }
