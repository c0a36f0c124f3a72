"""Two-stage fuzzy sines-transients-noise decomposition.

Stage 1 separates tonal content from the rest with a long analysis window;
stage 2 splits the residual into transients and noise with a short window.
Both stages median-filter the magnitude spectrogram along time and frequency,
convert the filtered ratios into soft masks through a saturating function,
and apply the masks to the complex spectrogram. Masked components sum back
to the input by construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FREQ_AXIS,
    TIME_AXIS,
    AudioBuffer,
    Spectrogram,
    StftParams,
    istft,
    median_filter_axis,
    stft,
)
from .errors import ConfigurationError


@dataclass
class StnThresholds:
    """Upper/lower saturation thresholds for the soft-mask function."""

    beta_u: float
    beta_l: float

    def __post_init__(self):
        if not 0.0 < self.beta_u <= 1.0:
            raise ConfigurationError(f"beta_u must be in (0, 1], got {self.beta_u}")
        if not 0.0 <= self.beta_l < 1.0:
            raise ConfigurationError(f"beta_l must be in [0, 1), got {self.beta_l}")
        if self.beta_l >= self.beta_u:
            raise ConfigurationError(
                f"beta_l ({self.beta_l}) must be below beta_u ({self.beta_u})"
            )


STAGE1_THRESHOLDS = StnThresholds(beta_u=0.80, beta_l=0.70)
STAGE2_THRESHOLDS = StnThresholds(beta_u=0.85, beta_l=0.75)


@dataclass
class MaskSet:
    """Soft masks for sines, transients, and noise; elementwise S+T+N = 1."""

    sines: np.ndarray
    transients: np.ndarray
    noise: np.ndarray


@dataclass
class StnComponents:
    sines: AudioBuffer
    transients: AudioBuffer
    noise: AudioBuffer


@dataclass
class StnConfig:
    """Window/hop per stage (samples at the processing rate), thresholds,
    and the median-filter spans in physical units."""

    long_window: int = 8192
    long_hop: int = 2048
    short_window: int = 512
    short_hop: int = 128
    stage1: StnThresholds = field(default_factory=lambda: STAGE1_THRESHOLDS)
    stage2: StnThresholds = field(default_factory=lambda: STAGE2_THRESHOLDS)
    time_median_span_s: float = 0.2
    freq_median_span_hz: float = 500.0


def saturating_mask(a, thresholds: StnThresholds):
    """Map a ratio in [0, 1] to a soft mask value.

    1 above beta_u, 0 below beta_l, and a raised-sine-squared transition in
    between. Accepts scalars or arrays.
    """
    a = np.asarray(a, dtype=np.float64)
    bu, bl = thresholds.beta_u, thresholds.beta_l
    t = (a - bl) / (bu - bl)
    mid = np.sin(0.5 * np.pi * np.clip(t, 0.0, 1.0)) ** 2
    out = np.where(a >= bu, 1.0, np.where(a >= bl, mid, 0.0))
    return out if out.ndim else float(out)


def _odd_span(x: float) -> int:
    n = max(1, int(round(x)))
    return n if n % 2 else n + 1


def median_lengths(params: StftParams, sample_rate: int, config: StnConfig):
    """Time/frequency median lengths (odd) for the configured spans."""
    t_len = _odd_span(config.time_median_span_s * sample_rate / params.hop_size)
    f_len = _odd_span(config.freq_median_span_hz * params.window_size / sample_rate)
    return t_len, f_len


def tonalness_transientness(mag: Spectrogram, time_median_len: int, freq_median_len: int):
    """Per-bin tonalness and transientness from axis-wise median filtering.

    The time-axis median preserves steady spectral ridges; the frequency-axis
    median preserves broadband vertical events. Their ratio scores each bin:
    R_s = M_time / (M_time + M_freq), R_t = 1 - R_s, with 0/0 defined as 0.5.
    """
    m_time = median_filter_axis(mag, TIME_AXIS, time_median_len).values
    m_freq = median_filter_axis(mag, FREQ_AXIS, freq_median_len).values
    denom = m_time + m_freq
    with np.errstate(invalid="ignore", divide="ignore"):
        r_s = np.where(denom > 0.0, m_time / np.where(denom > 0.0, denom, 1.0), 0.5)
    r_t = 1.0 - r_s
    return mag.copy_with(r_s), mag.copy_with(r_t)


def compute_masks(r_s: Spectrogram, r_t: Spectrogram, thresholds: StnThresholds) -> MaskSet:
    """Soft masks from tonalness/transientness scores.

    The noise mask is the residual 1 - S - T, clamped at zero only to guard
    user-supplied thresholds below 0.5 (with the defaults S + T <= 1 always).
    """
    if r_s.values.shape != r_t.values.shape:
        raise ConfigurationError("R_s and R_t shapes differ")
    s = saturating_mask(r_s.values, thresholds)
    t = saturating_mask(r_t.values, thresholds)
    n = np.maximum(1.0 - s - t, 0.0)
    return MaskSet(sines=s, transients=t, noise=n)


def _stage_split(x: AudioBuffer, params: StftParams, thresholds, config: StnConfig,
                 keep: str):
    """One decomposition stage: mask the spectrogram and invert both parts.

    The signal is zero-padded by a full window on each side so that every
    input sample has complete overlap coverage, which makes kept + rest sum
    back to x at machine precision. `keep` selects which mask ('sines' or
    'transients') extracts the kept component; the rest is 1 - mask.
    """
    pad = params.window_size
    xp = AudioBuffer(np.pad(x.samples, (pad, pad)), x.sample_rate)
    spec = stft(xp, params)
    mag = spec.copy_with(np.abs(spec.values))
    t_len, f_len = median_lengths(params, x.sample_rate, config)
    r_s, r_t = tonalness_transientness(mag, t_len, f_len)
    masks = compute_masks(r_s, r_t, thresholds)
    mask = getattr(masks, keep)
    kept = istft(spec.copy_with(spec.values * mask), params, len(xp))
    rest = istft(spec.copy_with(spec.values * (1.0 - mask)), params, len(xp))
    sl = slice(pad, pad + len(x))
    return (
        AudioBuffer(kept.samples[sl], x.sample_rate),
        AudioBuffer(rest.samples[sl], x.sample_rate),
        masks,
    )


def stn_decompose(x: AudioBuffer, config: StnConfig | None = None) -> StnComponents:
    components, _ = stn_decompose_with_masks(x, config)
    return components


def stn_decompose_with_masks(x: AudioBuffer, config: StnConfig | None = None):
    """Run both decomposition stages; also return the per-stage mask sets.

    Stage 1 keeps the sines via the tonalness mask and passes everything else
    on; stage 2 keeps the transients via the transientness mask, leaving the
    noise as the residual. All outputs have the input's length exactly.
    """
    if config is None:
        config = StnConfig()
    if len(x) == 0:
        raise ConfigurationError("cannot decompose an empty signal")
    if len(x) < config.long_window:
        warnings.warn(
            "input shorter than the stage-1 analysis window; "
            "processing a single zero-padded frame",
            stacklevel=2,
        )

    p1 = StftParams(config.long_window, config.long_hop)
    sines, residual, masks1 = _stage_split(x, p1, config.stage1, config, keep="sines")

    p2 = StftParams(config.short_window, config.short_hop)
    transients, noise, masks2 = _stage_split(
        residual, p2, config.stage2, config, keep="transients"
    )

    return StnComponents(sines, transients, noise), (masks1, masks2)
