"""Deterministic synthetic test signals with analytic ground truth."""

from __future__ import annotations

import math

import numpy as np

from .core import AudioBuffer
from .errors import ConfigurationError

CLICK_DECAY_S = 0.001  # exponential decay constant of a generated click
CLICK_LEN_S = 0.008
DEFAULT_HISS_RMS = 0.02


def _check_freq(freq: float, sample_rate: int):
    if freq <= 0 or freq >= sample_rate / 2:
        raise ConfigurationError(
            f"frequency {freq} Hz outside (0, Nyquist) for rate {sample_rate}"
        )


def sine(freq: float, duration: float, sample_rate: int = 44100,
         amplitude: float = 1.0) -> AudioBuffer:
    _check_freq(freq, sample_rate)
    n = round(duration * sample_rate)
    t = np.arange(n) / sample_rate
    return AudioBuffer(amplitude * np.sin(2.0 * np.pi * freq * t), sample_rate)


def two_tone(f1: float, f2: float, duration: float, sample_rate: int = 44100) -> AudioBuffer:
    _check_freq(f1, sample_rate)
    _check_freq(f2, sample_rate)
    n = round(duration * sample_rate)
    t = np.arange(n) / sample_rate
    x = 0.5 * (np.sin(2.0 * np.pi * f1 * t) + np.sin(2.0 * np.pi * f2 * t))
    return AudioBuffer(x, sample_rate)


def click_waveform(sample_rate: int) -> np.ndarray:
    """A single click: a sharp exponentially decaying burst."""
    n = round(CLICK_LEN_S * sample_rate)
    t = np.arange(n) / sample_rate
    return np.exp(-t / CLICK_DECAY_S)


def click_times(duration: float, period: float, start: float = 0.0) -> np.ndarray:
    """Analytic onset times of click_train/click_plus_hiss, in seconds."""
    return np.arange(start, duration - 1e-9, period)


def click_train(period: float, duration: float, sample_rate: int = 44100,
                start: float = 0.0, amplitude: float = 1.0) -> AudioBuffer:
    if period <= 0:
        raise ConfigurationError(f"period must be positive, got {period}")
    n = round(duration * sample_rate)
    x = np.zeros(n)
    click = amplitude * click_waveform(sample_rate)
    for t in click_times(duration, period, start):
        i = round(t * sample_rate)
        j = min(n, i + len(click))
        x[i:j] += click[: j - i]
    return AudioBuffer(x, sample_rate)


def shaped_noise(slope_db_per_octave: float, duration: float, sample_rate: int = 44100,
                 seed: int = 0, rms: float = 0.1) -> AudioBuffer:
    """Gaussian noise whose power spectrum tilts by the given dB/octave.

    The tilt is applied above 20 Hz (flat below, to keep negative slopes
    bounded) by shaping the rfft of a white realization, then the result is
    scaled to the requested RMS.
    """
    n = round(duration * sample_rate)
    rng = np.random.Generator(np.random.PCG64(seed))
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    f = np.fft.rfftfreq(n, 1.0 / sample_rate)
    f_shaped = np.maximum(f, 20.0)
    # amplitude exponent p gives a power slope of 20*p*log10(2) dB/octave
    p = slope_db_per_octave / (20.0 * math.log10(2.0))
    spec *= (f_shaped / 1000.0) ** p
    x = np.fft.irfft(spec, n=n)
    x *= rms / np.sqrt(np.mean(x**2))
    return AudioBuffer(x, sample_rate)


def click_plus_hiss(duration: float, sample_rate: int = 44100, seed: int = 0,
                    period: float = 0.25, hiss_rms: float = DEFAULT_HISS_RMS) -> AudioBuffer:
    """Sharp clicks over a gentle broadband hiss (can-opening analogue).

    Clicks start one period into the signal so the first event is not glued
    to the buffer edge; their times are click_times(duration, period, period).
    """
    clicks = click_train(period, duration, sample_rate, start=period)
    hiss = shaped_noise(-3.0, duration, sample_rate, seed=seed, rms=hiss_rms)
    return AudioBuffer(clicks.samples + hiss.samples, sample_rate)


_KINDS = {
    "sine": lambda duration, sample_rate, seed, kw: sine(
        kw.get("freq", 440.0), duration, sample_rate
    ),
    "two_tone": lambda duration, sample_rate, seed, kw: two_tone(
        kw.get("f1", 440.0), kw.get("f2", 660.0), duration, sample_rate
    ),
    "click_train": lambda duration, sample_rate, seed, kw: click_train(
        kw.get("period", 0.25), duration, sample_rate
    ),
    "shaped_noise": lambda duration, sample_rate, seed, kw: shaped_noise(
        kw.get("slope_db_per_octave", -3.0), duration, sample_rate, seed
    ),
    "click_plus_hiss": lambda duration, sample_rate, seed, kw: click_plus_hiss(
        duration, sample_rate, seed
    ),
}


def gen_signal(kind: str, duration: float, sample_rate: int = 44100, seed: int = 0,
               **kwargs) -> AudioBuffer:
    """Uniform entry point over all generators; deterministic given seed."""
    if kind not in _KINDS:
        raise ConfigurationError(f"unknown signal kind {kind!r}; choose from {sorted(_KINDS)}")
    if duration <= 0:
        raise ConfigurationError(f"duration must be positive, got {duration}")
    return _KINDS[kind](duration, sample_rate, seed, kwargs)
