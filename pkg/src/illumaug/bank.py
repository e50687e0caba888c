"""Harvest, persist, and sample the empirical illuminant set of a corpus.

A bank is the ordered list of illuminants estimated from a training set,
one entry per source image, with the estimator configuration that produced
them. Sampling is uniform over entries, directly from the raw empirical
distribution (no clustering).

File format (UTF-8 text, diff-friendly, one record per line):

    #illumbank v1 n=<n> p=<p|inf> sigma=<sigma> sat=<threshold>
    <id>\\t<r>\\t<g>\\t<b>

Floats carry 17 significant digits so a save/load round trip is exact.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .color import Illuminant, ImageBuffer, LabPoint, rgb_to_lab
from .constancy import EstimatorConfig, angular_error_degrees, estimate_illuminant
from .errors import BankFormatError, DomainError

log = logging.getLogger(__name__)

_HEADER_RE = re.compile(r"^#illumbank v1 n=(\S+) p=(\S+) sigma=(\S+) sat=(\S+)$")

#: Unit-norm tolerance applied to rows of a bank file. Rows passing it but
#: missing the Illuminant invariant (1e-9) are renormalized, so hand-written
#: files load while exact round trips stay bit-identical.
LOAD_NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BankEntry:
    """One harvested illuminant with the id of the image it came from."""

    id: str
    illuminant: Illuminant

    def __post_init__(self):
        if not self.id:
            raise ValueError("entry id must be non-empty")
        if "\t" in self.id or "\n" in self.id or "\r" in self.id:
            raise ValueError(f"entry id may not contain tabs or newlines: {self.id!r}")


@dataclass
class IlluminantBank:
    """Ordered illuminant entries plus the estimator that built them."""

    entries: tuple[BankEntry, ...]
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)

    def __post_init__(self):
        self.entries = tuple(self.entries)
        if not self.entries:
            raise ValueError("a bank needs at least one entry to permit sampling")
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("bank entry ids must be unique")

    def __len__(self) -> int:
        return len(self.entries)


def build_bank(
    images: Iterable[tuple[str, ImageBuffer]],
    cfg: EstimatorConfig = EstimatorConfig(),
) -> IlluminantBank:
    """Estimate one illuminant per (id, image) pair, in input order.

    Estimation failures (all-black frames, fully saturated frames) are
    logged and skipped; only an empty input or a failure on every image
    is fatal.
    """
    entries: list[BankEntry] = []
    total = 0
    for image_id, img in images:
        total += 1
        try:
            tau = estimate_illuminant(img, cfg)
        except DomainError as exc:
            log.warning("skipping %s: %s", image_id, exc)
            continue
        entries.append(BankEntry(image_id, tau))
    if total == 0:
        raise DomainError("cannot build a bank from an empty input sequence")
    if not entries:
        raise DomainError(f"all {total} estimations failed; bank would be empty")
    return IlluminantBank(entries, cfg)


def sample_illuminant(bank: IlluminantBank, rng: np.random.Generator) -> Illuminant:
    """Draw one entry uniformly. The caller owns (and controls) the RNG state."""
    k = int(rng.integers(0, len(bank.entries)))
    return bank.entries[k].illuminant


def bank_lab_projection(bank: IlluminantBank) -> list[tuple[str, LabPoint]]:
    """Project every entry onto L*a*b*, in bank order.

    Each illuminant is scaled so its largest component is 1 (the color it
    encodes at full brightness) and treated as an encoded-sRGB triple.
    """
    out = []
    for entry in bank.entries:
        v = entry.illuminant.as_array()
        out.append((entry.id, rgb_to_lab(v / v.max())))
    return out


def bank_summary(bank: IlluminantBank) -> tuple[int, Illuminant, float]:
    """(entry count, normalized mean illuminant, mean angular spread in degrees)."""
    stacked = np.stack([e.illuminant.as_array() for e in bank.entries])
    mean = stacked.mean(axis=0)
    mean_illum = Illuminant.from_rgb(float(mean[0]), float(mean[1]), float(mean[2]))
    spread = float(
        np.mean([angular_error_degrees(e.illuminant, mean_illum) for e in bank.entries])
    )
    return len(bank.entries), mean_illum, spread


def _format_p(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:.17g}"


def save_bank(bank: IlluminantBank, path) -> None:
    """Write the bank file; load_bank reproduces the bank exactly."""
    cfg = bank.estimator
    lines = [
        f"#illumbank v1 n={cfg.deriv_order} p={_format_p(cfg.minkowski_p)} "
        f"sigma={cfg.smoothing_sigma:.17g} sat={cfg.saturation_threshold:.17g}"
    ]
    for entry in bank.entries:
        t = entry.illuminant
        lines.append(f"{entry.id}\t{t.r:.17g}\t{t.g:.17g}\t{t.b:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_float(token: str, what: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise BankFormatError(f"line {line_no}: bad {what} {token!r}") from None


def load_bank(path) -> IlluminantBank:
    """Parse a bank file, validating unit-norm rows (line numbers in errors)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise BankFormatError("line 1: empty bank file")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise BankFormatError(f"line 1: bad header {lines[0]!r}")
    n_str, p_str, sigma_str, sat_str = m.groups()
    try:
        cfg = EstimatorConfig(
            deriv_order=int(n_str),
            minkowski_p=math.inf if p_str == "inf" else _parse_float(p_str, "p", 1),
            smoothing_sigma=_parse_float(sigma_str, "sigma", 1),
            saturation_threshold=_parse_float(sat_str, "sat", 1),
        )
    except ValueError as exc:
        raise BankFormatError(f"line 1: {exc}") from None

    entries: list[BankEntry] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise BankFormatError(f"line {line_no}: expected 4 tab-separated fields, got {len(fields)}")
        entry_id = fields[0]
        if not entry_id:
            raise BankFormatError(f"line {line_no}: empty id")
        if entry_id in seen:
            raise BankFormatError(f"line {line_no}: duplicate id {entry_id!r}")
        seen.add(entry_id)
        rgb = [_parse_float(tok, "component", line_no) for tok in fields[1:]]
        if any(not math.isfinite(v) or v < 0.0 for v in rgb):
            raise BankFormatError(f"line {line_no}: components must be finite and non-negative")
        norm = math.sqrt(sum(v * v for v in rgb))
        if abs(norm - 1.0) > LOAD_NORM_TOLERANCE:
            raise BankFormatError(f"line {line_no}: illuminant is not unit length (|.| = {norm!r})")
        if abs(norm - 1.0) <= 1e-9:
            illum = Illuminant(rgb[0], rgb[1], rgb[2])
        else:
            illum = Illuminant.from_rgb(rgb[0], rgb[1], rgb[2])
        entries.append(BankEntry(entry_id, illum))
    if not entries:
        raise BankFormatError("line 2: bank file has no entries")
    return IlluminantBank(entries, cfg)
