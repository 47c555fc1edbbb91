"""Synthetic corpora: tone sequences, Morse code audio, white and pink noise.

Everything is seed-deterministic and satisfies the ingest preconditions
(peak <= 1, caller-chosen sample rate).
"""

from __future__ import annotations

import math
import os
import wave
from dataclasses import dataclass

import numpy as np

from een.errors import UnsupportedCharacter
from een.ingest import EncodeConfig, SampleBuffer

MORSE_TABLE = {
    "A": ".-", "B": "-...", "C": "-.-.", "D": "-..", "E": ".", "F": "..-.",
    "G": "--.", "H": "....", "I": "..", "J": ".---", "K": "-.-", "L": ".-..",
    "M": "--", "N": "-.", "O": "---", "P": ".--.", "Q": "--.-", "R": ".-.",
    "S": "...", "T": "-", "U": "..-", "V": "...-", "W": ".--", "X": "-..-",
    "Y": "-.--", "Z": "--..",
    "0": "-----", "1": ".----", "2": "..---", "3": "...--", "4": "....-",
    "5": ".....", "6": "-....", "7": "--...", "8": "---..", "9": "----.",
    ".": ".-.-.-", ",": "--..--", "?": "..--..", "'": ".----.", "/": "-..-.",
    "-": "-....-", "=": "-...-", ":": "---...", ";": "-.-.-.", "+": ".-.-.",
    "(": "-.--.", ")": "-.--.-", "\"": ".-..-.", "@": ".--.-.", "!": "-.-.--",
}

DOT_UNITS = 1
DASH_UNITS = 3
SYMBOL_GAP_UNITS = 1
CHAR_GAP_UNITS = 3
WORD_GAP_UNITS = 7


@dataclass(frozen=True)
class ToneEvent:
    """One note: semitone bin, onset, length, and linear amplitude."""

    scale_idx: int
    start: float
    duration: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not (0 < self.amplitude <= 1):
            raise ValueError("amplitude must be in (0, 1]")


def gen_tone_corpus(events: list[ToneEvent], cfg: EncodeConfig,
                    sample_rate: int, duration: float | None = None) -> SampleBuffer:
    """Sum of sinusoids at scale-bin centers with 5 ms linear fades.

    Overlapping events are allowed; if the sum clips, the whole buffer is
    renormalized to peak 1 (the encoding is gain-invariant anyway).
    """
    if duration is None:
        duration = max((e.start + e.duration for e in events), default=0.0)
    n = int(round(duration * sample_rate))
    out = np.zeros(n)
    for ev in events:
        freq = cfg.scale_center(ev.scale_idx)
        i0 = int(round(ev.start * sample_rate))
        i1 = min(int(round((ev.start + ev.duration) * sample_rate)), n)
        if i1 <= i0:
            continue
        tau = np.arange(i1 - i0) / sample_rate
        tone = ev.amplitude * np.sin(2.0 * math.pi * freq * tau)
        ramp = min(0.005, ev.duration / 2.0)
        n_ramp = int(round(ramp * sample_rate))
        if n_ramp > 0:
            env = np.ones(i1 - i0)
            env[:n_ramp] = np.linspace(0.0, 1.0, n_ramp, endpoint=False)
            env[-n_ramp:] *= np.linspace(1.0, 0.0, n_ramp)
            tone *= env
        out[i0:i1] += tone
    peak = float(np.max(np.abs(out))) if n else 0.0
    if peak > 1.0:
        out /= peak
    return SampleBuffer(out, sample_rate)


def morse_units(text: str) -> list[tuple[bool, int]]:
    """(on, units) segments for a text, PARIS timing, no trailing gap."""
    segments: list[tuple[bool, int]] = []
    first_word = True
    for word in text.upper().split(" "):
        if not word:
            continue
        if not first_word:
            segments.append((False, WORD_GAP_UNITS))
        first_word = False
        for ci, ch in enumerate(word):
            code = MORSE_TABLE.get(ch)
            if code is None:
                raise UnsupportedCharacter(f"no Morse code for {ch!r}")
            if ci > 0:
                segments.append((False, CHAR_GAP_UNITS))
            for si, sym in enumerate(code):
                if si > 0:
                    segments.append((False, SYMBOL_GAP_UNITS))
                segments.append((True, DOT_UNITS if sym == "." else DASH_UNITS))
    return segments


def gen_morse(text: str, wpm: float, carrier: float = 600.0,
              sample_rate: int = 44100) -> SampleBuffer:
    """Keyed sine carrier; unit = 1.2/wpm s (PARIS), 2 ms on/off ramps."""
    if wpm <= 0:
        raise ValueError("wpm must be positive")
    unit = 1.2 / wpm
    segments = morse_units(text)
    total_units = sum(units for _, units in segments)
    n = int(round(total_units * unit * sample_rate))
    out = np.zeros(n)
    n_ramp = int(round(0.002 * sample_rate))
    cum = 0
    for on, units in segments:
        i0 = int(round(cum * unit * sample_rate))
        cum += units
        i1 = int(round(cum * unit * sample_rate))
        if on and i1 > i0:
            tau = np.arange(i1 - i0) / sample_rate
            seg = np.sin(2.0 * math.pi * carrier * tau)
            r = min(n_ramp, (i1 - i0) // 2)
            if r > 0:
                seg[:r] *= np.linspace(0.0, 1.0, r, endpoint=False)
                seg[-r:] *= np.linspace(1.0, 0.0, r)
            out[i0:i1] = seg
    return SampleBuffer(out, sample_rate)


def gen_noise(kind: str, duration: float, seed: int,
              sample_rate: int = 44100) -> SampleBuffer:
    """White (iid uniform) or pink (Voss-McCartney, 16 rows) noise.

    Pink rows are held white sources: row k redraws every 2^k samples.
    Row values are drawn row-by-row (k = 0 first) from PCG64(seed), so the
    output is a pure function of (kind, duration, seed, sample_rate).
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    n = int(round(duration * sample_rate))
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "white":
        out = rng.uniform(-1.0, 1.0, n)
    elif kind == "pink":
        out = np.zeros(n)
        for k in range(16):
            hold = 1 << k
            vals = rng.uniform(-1.0, 1.0, (n + hold - 1) // hold)
            out += np.repeat(vals, hold)[:n]
        peak = float(np.max(np.abs(out)))
        if peak > 0:
            out /= peak
    else:
        raise ValueError("kind must be 'white' or 'pink'")
    return SampleBuffer(out, sample_rate)


def write_wav(buf: SampleBuffer, path: str | os.PathLike) -> None:
    """Write 16-bit PCM mono WAV."""
    x = np.clip(np.asarray(buf.samples, dtype=np.float64), -1.0, 1.0)
    pcm = (x * 32767.0).round().astype("<i2")
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    with wave.open(tmp, "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(buf.sample_rate)
        fh.writeframes(pcm.tobytes())
    os.replace(tmp, path)
