"""Audio ingestion: decode WAV files and encode them as a scale-time-volume grid.

The scale axis is a bank of equal-temperament semitone bins (84 by default,
centers f0 * 2^(k/12), half-open edges at +-1/24 octave around each center).
Time is sliced into non-overlapping frames (0.1 s by default), and per-cell
power is expressed as an integer volume 0..vmax on a decibel scale relative
to the loudest cell of the file, which removes recording gain.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.io import wavfile

from een.errors import (
    AllSilent,
    EmptyInput,
    SampleRateTooLow,
    UnsupportedFormat,
)

GRID_FORMAT = "een-grid v1"


@dataclass(frozen=True)
class EncodeConfig:
    """Parameters of the scale-time-volume encoding."""

    n_scales: int = 84
    f0: float = 64.0
    frame_sec: float = 0.1
    vmax: int = 10
    db_floor: float = -60.0
    activity_min: int = 1

    def __post_init__(self):
        if self.n_scales < 2:
            raise ValueError("n_scales must be >= 2")
        if not (self.f0 > 0):
            raise ValueError("f0 must be positive")
        if not (self.frame_sec > 0):
            raise ValueError("frame_sec must be positive")
        if self.vmax < 1:
            raise ValueError("vmax must be >= 1")
        if not (self.db_floor < 0):
            raise ValueError("db_floor must be negative")
        if not (0 <= self.activity_min <= self.vmax):
            raise ValueError("activity_min must be in [0, vmax]")

    def scale_center(self, k: int) -> float:
        return self.f0 * 2.0 ** (k / 12.0)

    def min_sample_rate(self) -> float:
        # Nyquist must reach the upper edge of the top bin (center * 2^(1/24)).
        top_edge = self.f0 * 2.0 ** ((self.n_scales - 1) / 12.0 + 1.0 / 24.0)
        return 2.0 * top_edge

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EncodeConfig":
        obj = json.loads(text)
        if not isinstance(obj, dict):
            raise ValueError("encode config must be a flat JSON object")
        return cls(**obj)


DEFAULT_CONFIG = EncodeConfig()


@dataclass
class SampleBuffer:
    """Mono audio: float amplitudes (nominally in [-1, 1]) at a fixed rate."""

    samples: np.ndarray
    sample_rate: int

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def scaled(self, gain: float) -> "SampleBuffer":
        return SampleBuffer(self.samples * gain, self.sample_rate)


class Spectrogram(NamedTuple):
    """Per-frame power spectrum plus the FFT bin frequencies."""

    power: np.ndarray  # (n_frames, n_bins), real nonnegative
    freqs: np.ndarray  # (n_bins,), Hz


@dataclass
class ScaleTimeGrid:
    """Sparse grid of active pixels: (scale_idx, time_idx) -> integer volume."""

    config: EncodeConfig
    pixels: dict[tuple[int, int], int]
    n_frames: int

    @property
    def n_pixels(self) -> int:
        return len(self.pixels)

    def items_sorted(self):
        return sorted(self.pixels.items())


def decode_audio(path: str | os.PathLike, cfg: EncodeConfig | None = None) -> SampleBuffer:
    """Decode a RIFF/WAVE PCM file to a mono SampleBuffer in [-1, 1].

    Stereo is downmixed by channel mean.  Raises UnsupportedFormat for
    anything that is not integer PCM or IEEE float WAV, and SampleRateTooLow
    when the file cannot cover the top scale bin of `cfg` (defaults apply
    when cfg is None).
    """
    if cfg is None:
        cfg = DEFAULT_CONFIG
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:  # scipy raises ValueError for bad/unknown formats
        raise UnsupportedFormat(f"{path}: {exc}") from exc

    if rate < cfg.min_sample_rate():
        raise SampleRateTooLow(
            f"{path}: sample rate {rate} Hz < required "
            f"{cfg.min_sample_rate():.1f} Hz for the top scale bin"
        )

    x = np.asarray(data)
    if x.dtype == np.uint8:
        y = (x.astype(np.float64) - 128.0) / 128.0
    elif x.dtype == np.int16:
        y = x.astype(np.float64) / 32768.0
    elif x.dtype == np.int32:
        # covers 24-bit PCM too: scipy stores it in the upper 3 bytes
        y = x.astype(np.float64) / 2147483648.0
    elif x.dtype in (np.float32, np.float64):
        y = np.clip(x.astype(np.float64), -1.0, 1.0)
    else:
        raise UnsupportedFormat(f"{path}: unsupported sample dtype {x.dtype}")

    if y.ndim == 2:
        y = y.mean(axis=1)
    return SampleBuffer(y, int(rate))


def compute_spectrogram(buf: SampleBuffer, cfg: EncodeConfig) -> Spectrogram:
    """Hann-windowed power spectra over non-overlapping frame_sec frames.

    Frames are zero-padded to the next power of two; a trailing partial
    frame is zero-padded and kept.
    """
    x = np.asarray(buf.samples, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("no samples")
    frame_len = int(round(cfg.frame_sec * buf.sample_rate))
    if frame_len < 1:
        raise EmptyInput("frame shorter than one sample")
    n_frames = int(math.ceil(x.size / frame_len))
    nfft = 1
    while nfft < frame_len:
        nfft *= 2
    window = np.hanning(frame_len)
    power = np.empty((n_frames, nfft // 2 + 1))
    for t in range(n_frames):
        frame = x[t * frame_len:(t + 1) * frame_len]
        if frame.size < frame_len:
            frame = np.pad(frame, (0, frame_len - frame.size))
        spec = np.fft.rfft(frame * window, n=nfft)
        power[t] = spec.real ** 2 + spec.imag ** 2
    freqs = np.fft.rfftfreq(nfft, d=1.0 / buf.sample_rate)
    return Spectrogram(power, freqs)


def map_to_scales(spec: Spectrogram, cfg: EncodeConfig) -> np.ndarray:
    """Sum FFT-bin power into semitone bins; returns (n_scales, n_frames).

    Bin k covers [center*2^(-1/24), center*2^(1/24)); FFT bins outside
    every scale bin are discarded.
    """
    freqs = spec.freqs
    k = np.full(freqs.shape, -1, dtype=np.int64)
    pos = freqs > 0
    # k - 0.5 <= 12*log2(f/f0) < k + 0.5  <=>  f in bin k (half-open edges)
    k[pos] = np.floor(12.0 * np.log2(freqs[pos] / cfg.f0) + 0.5).astype(np.int64)
    valid = (k >= 0) & (k < cfg.n_scales)
    out = np.zeros((cfg.n_scales, spec.power.shape[0]))
    for t in range(spec.power.shape[0]):
        out[:, t] = np.bincount(k[valid], weights=spec.power[t, valid],
                                minlength=cfg.n_scales)
    return out


def normalize_volume(raw: np.ndarray, cfg: EncodeConfig) -> ScaleTimeGrid:
    """Quantize powers to integer volumes relative to the grid maximum.

    dB = 10*log10(P / Pmax), clamped to [db_floor, 0], mapped linearly to
    [0, vmax] and rounded half-up.  Zero-power cells get volume 0; cells
    below activity_min are dropped.
    """
    p_max = raw.max() if raw.size else 0.0
    if not (p_max > 0):
        raise AllSilent("no cell with positive power")
    vol = np.zeros(raw.shape, dtype=np.int64)
    pos = raw > 0
    db = 10.0 * np.log10(raw[pos] / p_max)
    db = np.clip(db, cfg.db_floor, 0.0)
    scaled = cfg.vmax * (db - cfg.db_floor) / (-cfg.db_floor)
    vol[pos] = np.floor(scaled + 0.5).astype(np.int64)  # round half-up
    pixels: dict[tuple[int, int], int] = {}
    keep = vol >= cfg.activity_min  # activity_min=0 keeps every cell
    for s, t in zip(*np.nonzero(keep)):
        pixels[(int(s), int(t))] = int(vol[s, t])
    return ScaleTimeGrid(cfg, pixels, int(raw.shape[1]))


def encode_buffer(buf: SampleBuffer, cfg: EncodeConfig | None = None) -> ScaleTimeGrid:
    """Spectrogram -> scale binning -> volume quantization."""
    if cfg is None:
        cfg = DEFAULT_CONFIG
    return normalize_volume(map_to_scales(compute_spectrogram(buf, cfg), cfg), cfg)


def encode_file(path: str | os.PathLike, cfg: EncodeConfig | None = None) -> ScaleTimeGrid:
    if cfg is None:
        cfg = DEFAULT_CONFIG
    return encode_buffer(decode_audio(path, cfg), cfg)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_grid(grid: ScaleTimeGrid, path: str | os.PathLike,
               extra_comments: list[str] | None = None) -> None:
    """Write the `een-grid v1` CSV (sorted by scale then time, integers only)."""
    cfg = grid.config
    buf = io.StringIO()
    buf.write(f"# {GRID_FORMAT}\n")
    buf.write(
        f"# scales={cfg.n_scales} frame_sec={_fmt(cfg.frame_sec)} "
        f"vmax={cfg.vmax} f0={_fmt(cfg.f0)} db_floor={_fmt(cfg.db_floor)} "
        f"activity_min={cfg.activity_min}\n"
    )
    buf.write(f"# frames={grid.n_frames}\n")
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    buf.write("scale,time,volume\n")
    for (s, t), v in grid.items_sorted():
        buf.write(f"{s},{t},{v}\n")
    _atomic_write_text(path, buf.getvalue())


def read_grid(path: str | os.PathLike) -> ScaleTimeGrid:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != f"# {GRID_FORMAT}":
        raise UnsupportedFormat(f"{path}: not a {GRID_FORMAT} file")
    meta: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines[1:], start=1):
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, val = token.split("=", 1)
                    meta.setdefault(key, val)
            continue
        if line != "scale,time,volume":
            raise UnsupportedFormat(f"{path}: bad header line {line!r}")
        body_start = i + 1
        break
    if body_start is None:
        raise UnsupportedFormat(f"{path}: missing header")
    try:
        cfg = EncodeConfig(
            n_scales=int(meta["scales"]),
            f0=float(meta["f0"]),
            frame_sec=float(meta["frame_sec"]),
            vmax=int(meta["vmax"]),
            db_floor=float(meta["db_floor"]),
            activity_min=int(meta["activity_min"]),
        )
        n_frames = int(meta["frames"])
    except KeyError as exc:
        raise UnsupportedFormat(f"{path}: missing grid metadata {exc}") from exc
    pixels: dict[tuple[int, int], int] = {}
    for line in lines[body_start:]:
        if not line:
            continue
        s, t, v = (int(f) for f in line.split(","))
        if not (0 <= s < cfg.n_scales and 0 <= t < n_frames):
            raise UnsupportedFormat(f"{path}: pixel ({s},{t}) outside the grid")
        pixels[(s, t)] = v
    return ScaleTimeGrid(cfg, pixels, n_frames)


def _atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
