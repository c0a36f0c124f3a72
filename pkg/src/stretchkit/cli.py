"""Command-line interface: stretch a WAV file.

    stretch <in> <out> --alpha <f> [--mode nm|ni|nd|an] [--seed <n>]
            [--config <path>] [--stems <dir>] [--onsets <csv>] [-v]

Exit codes: 0 success, 1 I/O error, 2 configuration error. A machine-readable
summary line prefixed RESULT: is printed on stdout.

The optional config file is flat `key = value` text (# comments allowed).
Keys are the StretchConfig fields, nested ones dotted, e.g.:

    alpha = 4
    mode = nm
    noise.window_size = 1024
    stn.long_window = 8192
    transient.fade_s = 0.005

Command-line flags override config-file values.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
import time
from pathlib import Path

from .core import AudioBuffer
from .errors import AudioIOError, ConfigurationError
from .pipeline import MODES, StretchConfig, stretch_components, time_stretch
from .stn import stn_decompose
from .transients import detect_events, onsets_csv_rows
from .wavio import BIT_DEPTHS, read_wav, write_wav

log = logging.getLogger("stretchkit")

RATE_SCALED_FIELDS = {
    ("stn", "long_window"), ("stn", "long_hop"),
    ("stn", "short_window"), ("stn", "short_hop"),
    ("noise", "window_size"), ("noise", "hop_size"),
    ("pv", "window_size"), ("pv", "synthesis_hop"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stretch", description="Time-stretch a WAV file without changing its pitch."
    )
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--alpha", type=float, default=None, help="stretch factor (> 0)")
    p.add_argument("--mode", choices=MODES, default=None, help="method variant (default nm)")
    p.add_argument("--seed", type=int, default=None, help="excitation seed (default 0)")
    p.add_argument("--config", type=Path, default=None, help="flat key=value config file")
    p.add_argument("--stems", type=Path, default=None,
                   help="directory for decomposed and stretched component WAVs")
    p.add_argument("--onsets", type=Path, default=None,
                   help="CSV of detected transient onsets (input_sample,output_sample)")
    p.add_argument("--bit-depth", choices=BIT_DEPTHS, default="float32")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def parse_config_file(path: Path) -> dict:
    """Flat key=value lines into a {dotted key: string} dict."""
    values = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise AudioIOError(f"cannot read config {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _coerce(current, text: str, key: str):
    kind = type(current)
    try:
        if kind is bool:
            return text.lower() in ("1", "true", "yes")
        return kind(text)
    except ValueError:
        raise ConfigurationError(f"config key {key}: cannot parse {text!r} as {kind.__name__}")


def apply_config_values(config: StretchConfig, values: dict) -> StretchConfig:
    for key, text in values.items():
        parts = key.split(".")
        target = config
        for part in parts[:-1]:
            if not hasattr(target, part):
                raise ConfigurationError(f"unknown config section {key!r}")
            target = getattr(target, part)
        leaf = parts[-1]
        if not dataclasses.is_dataclass(target) or not hasattr(target, leaf):
            raise ConfigurationError(f"unknown config key {key!r}")
        setattr(target, leaf, _coerce(getattr(target, leaf), text, key))
    return config


def scale_for_rate(config: StretchConfig, sample_rate: int,
                   explicit: set[str]) -> StretchConfig:
    """Rescale sample-denominated defaults when the input is not 44.1 kHz.

    Time-denominated settings (median spans, fades) are already in seconds.
    Values the user set explicitly are taken literally.
    """
    if sample_rate == 44100:
        return config
    ratio = sample_rate / 44100.0
    for section, name in RATE_SCALED_FIELDS:
        if f"{section}.{name}" in explicit:
            continue
        target = getattr(config, section)
        scaled = max(2, int(round(getattr(target, name) * ratio / 2)) * 2)
        setattr(target, name, scaled)
    return config


def _load_stretch_config(args) -> tuple[StretchConfig, set[str]]:
    config = StretchConfig()
    explicit: set[str] = set()
    if args.config is not None:
        values = parse_config_file(args.config)
        explicit = set(values)
        config = apply_config_values(config, values)
    if args.alpha is not None:
        if not args.alpha > 0:
            raise ConfigurationError(f"--alpha must be positive, got {args.alpha}")
        config.alpha = args.alpha
    elif "alpha" not in explicit:
        raise ConfigurationError("--alpha is required (or set alpha in --config)")
    if args.mode is not None:
        config.mode = args.mode
    if args.seed is not None:
        config.seed = args.seed
    # re-run dataclass validation after mutation
    config.__post_init__()
    return config, explicit


def run(args) -> int:
    config, explicit = _load_stretch_config(args)
    x = read_wav(args.input)
    config = scale_for_rate(config, x.sample_rate, explicit)

    started = time.perf_counter()
    if config.mode in ("nm", "ni") and (args.stems or args.onsets):
        components = stn_decompose(x, config.stn)
        out, branches = stretch_components(components, config)
        if args.stems:
            args.stems.mkdir(parents=True, exist_ok=True)
            for name, buf in [
                ("sines", components.sines), ("transients", components.transients),
                ("noise", components.noise), ("sines_stretched", branches.sines),
                ("transients_stretched", branches.transients),
                ("noise_stretched", branches.noise),
            ]:
                write_wav(buf, args.stems / f"{name}.wav", args.bit_depth)
        if args.onsets:
            events = detect_events(components.transients, config.transient)
            with open(args.onsets, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["input_sample", "output_sample"])
                writer.writerows(onsets_csv_rows(events, config.alpha))
    else:
        if args.stems or args.onsets:
            log.warning("--stems/--onsets are only meaningful for nm/ni modes; ignored")
        out = time_stretch(x, config)
    elapsed = time.perf_counter() - started

    write_wav(out, args.output, args.bit_depth)
    print(
        f"RESULT: input={len(x)} alpha={config.alpha:g} output={len(out)} "
        f"mode={config.mode} seed={config.seed} time={elapsed:.2f}s"
    )
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AudioIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
