"""Top-level time-stretching pipeline and its method variants.

Modes:
  nm - decompose, stretch each component with its own method, recombine
       (noise morphing with magnitude multiplication).
  ni - as nm, but the morphing replaces magnitudes instead of multiplying.
  nd - noise morphing applied to the whole mixture, no decomposition or
       transient handling.
  an - plain phase vocoder on the whole mixture (quality anchor).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import AudioBuffer
from .errors import ConfigurationError
from .noisemorph import (
    VARIANT_MULTIPLY,
    VARIANT_REPLACE,
    NoiseMorphParams,
    stretch_noise,
)
from .stn import StnComponents, StnConfig, stn_decompose
from .transients import TransientDetectParams, detect_events, reposition_events
from .vocoder import PvParams, stretch_plain, stretch_sines

MODES = ("nm", "ni", "nd", "an")


@dataclass
class StretchConfig:
    alpha: float = 1.0
    mode: str = "nm"
    seed: int = 0
    stn: StnConfig = field(default_factory=StnConfig)
    noise: NoiseMorphParams = field(default_factory=NoiseMorphParams)
    pv: PvParams = field(default_factory=PvParams)
    transient: TransientDetectParams = field(default_factory=TransientDetectParams)

    def __post_init__(self):
        self.mode = self.mode.lower()
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not np.isfinite(self.alpha) or self.alpha <= 0:
            raise ConfigurationError(f"alpha must be positive and finite, got {self.alpha}")


@dataclass
class BranchOutputs:
    """Per-branch stretched signals (already trimmed to the output length)."""

    sines: AudioBuffer
    transients: AudioBuffer
    noise: AudioBuffer


def output_length(input_length: int, alpha: float) -> int:
    return int(round(alpha * input_length))


def _fit(buf: AudioBuffer, length: int) -> AudioBuffer:
    x = buf.samples
    if len(x) > length:
        x = x[:length]
    elif len(x) < length:
        x = np.pad(x, (0, length - len(x)))
    return AudioBuffer(x, buf.sample_rate)


def stretch_components(
    components: StnComponents, config: StretchConfig
) -> tuple[AudioBuffer, BranchOutputs]:
    """Stretch already-decomposed components and sum them (nm/ni modes)."""
    alpha = config.alpha
    length = output_length(len(components.sines), alpha)
    variant = VARIANT_REPLACE if config.mode == "ni" else VARIANT_MULTIPLY

    pv = replace(config.pv, alpha=alpha)
    sines = _fit(stretch_sines(components.sines, pv), length)
    events = detect_events(components.transients, config.transient)
    transients = _fit(
        reposition_events(events, alpha, length, components.transients.sample_rate), length
    )
    noise = _fit(
        stretch_noise(components.noise, alpha, config.noise, variant, seed=config.seed),
        length,
    )
    out = AudioBuffer(
        sines.samples + transients.samples + noise.samples, components.sines.sample_rate
    )
    return out, BranchOutputs(sines, transients, noise)


def time_stretch(x: AudioBuffer, config: StretchConfig) -> AudioBuffer:
    """Stretch a mono signal by config.alpha with the configured mode.

    The output length is round(alpha * len(x)) exactly, and the result is a
    deterministic function of (x, config)."""
    if len(x) == 0:
        raise ConfigurationError("cannot stretch an empty signal")
    mode = config.mode
    if mode in ("nm", "ni"):
        components = stn_decompose(x, config.stn)
        out, _ = stretch_components(components, config)
        return out
    length = output_length(len(x), config.alpha)
    if mode == "nd":
        return _fit(
            stretch_noise(x, config.alpha, config.noise, VARIANT_MULTIPLY, seed=config.seed),
            length,
        )
    return _fit(time_stretch_anchor(x, config.alpha, config.pv), length)


def time_stretch_anchor(x: AudioBuffer, alpha: float, params: PvParams | None = None) -> AudioBuffer:
    """Plain phase vocoder over the whole mixture, no peak locking."""
    return stretch_plain(x, alpha, params)
