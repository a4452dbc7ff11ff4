"""Versioned text cache for :class:`~prolatoscope.prolate.ProlateBasis`.

Layout::

    PROLATOSCOPE-BASIS v1
    c=1.0
    K=18
    N=66
    precision_bits=256
    mode=0
    lambda=5.72...e-1
    chi=...
    gamma=<N comma-separated decimals>
    ...
    checksum=sha256:<hex of every preceding byte>

All numbers are written with an explicit exponent and a fixed number of
significant digits, so writing a loaded basis reproduces the file exactly.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path

import mpmath

from .prolate import ProlateBasis, ProlateMode, validate_basis

HEADER = "PROLATOSCOPE-BASIS v1"
MIN_DIGITS = 40


class BasisFileError(ValueError):
    """Malformed, corrupt or inconsistent basis cache file."""


def _digits(precision_bits):
    return max(MIN_DIGITS, int(precision_bits * math.log10(2)) - 2)


def _fmt(x, digits):
    if x == 0:
        return "0"
    return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=1, max_fixed=0)


def dumps_basis(basis):
    """Serialize a basis to the cache text format (including checksum line)."""
    digits = _digits(basis.precision_bits)
    lines = [
        HEADER,
        f"c={basis.c!r}",
        f"K={basis.num_modes}",
        f"N={basis.matrix_order}",
        f"precision_bits={basis.precision_bits}",
    ]
    with mpmath.workprec(_parse_bits(basis.precision_bits)):
        for mode in basis.modes:
            lines.append(f"mode={mode.index}")
            lines.append(f"lambda={_fmt(mode.lam, digits)}")
            lines.append(f"chi={_fmt(mode.chi, digits)}")
            lines.append("gamma=" + ",".join(_fmt(g, digits) for g in mode.gamma_hp))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    return body + f"checksum=sha256:{digest}\n"


def basis_checksum(basis):
    """SHA-256 of the serialized basis; stable identifier for provenance."""
    return hashlib.sha256(dumps_basis(basis).encode("ascii")).hexdigest()


def save_basis(basis, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_basis(basis).encode("ascii"))


def _parse_bits(precision_bits):
    # enough guard bits that decimal -> binary -> decimal is the identity
    return max(precision_bits, math.ceil(_digits(precision_bits) * math.log2(10)) + 32)


class _Reader:
    def __init__(self, text):
        self.text = text
        self.lines = text.split("\n")
        self.pos = 0
        self.offset = 0

    def next(self, key):
        if self.pos >= len(self.lines) or (self.pos == len(self.lines) - 1 and not self.lines[-1]):
            raise BasisFileError(f"unexpected end of file at byte offset {self.offset} (expected '{key}=')")
        line = self.lines[self.pos]
        where = f"line {self.pos + 1}, byte offset {self.offset}"
        self.pos += 1
        self.offset += len(line) + 1
        name, sep, value = line.partition("=")
        if not sep or name != key:
            raise BasisFileError(f"expected '{key}=' at {where}, found {line[:40]!r}")
        return value, where


def loads_basis(text):
    """Parse and validate the cache text format."""
    if not text.startswith(HEADER + "\n"):
        first = text.split("\n", 1)[0]
        if first.startswith("PROLATOSCOPE-BASIS"):
            raise BasisFileError(f"unsupported basis file version: {first!r}")
        raise BasisFileError("not a basis file (missing header at byte offset 0)")
    body, sep, tail = text.rpartition("checksum=sha256:")
    if not sep or not body.endswith("\n"):
        raise BasisFileError(f"missing checksum line; file truncated at byte offset {len(text)}")
    digest = tail.strip()
    if hashlib.sha256(body.encode("ascii")).hexdigest() != digest:
        raise BasisFileError("checksum mismatch: file is corrupt")

    reader = _Reader(body)
    reader.pos, reader.offset = 1, len(HEADER) + 1
    try:
        c_raw, _ = reader.next("c")
        K_raw, _ = reader.next("K")
        N_raw, _ = reader.next("N")
        bits_raw, _ = reader.next("precision_bits")
        c, K, N, bits = float(c_raw), int(K_raw), int(N_raw), int(bits_raw)
    except ValueError as exc:
        if isinstance(exc, BasisFileError):
            raise
        raise BasisFileError(f"bad header field near byte offset {reader.offset}: {exc}") from None

    modes = []
    with mpmath.workprec(_parse_bits(bits)):
        for n in range(K):
            idx_raw, where = reader.next("mode")
            if int(idx_raw) != n:
                raise BasisFileError(f"mode index {idx_raw} at {where}, expected {n}")
            try:
                lam_raw, where = reader.next("lambda")
                lam = mpmath.mpf(lam_raw)
                chi_raw, where = reader.next("chi")
                chi = mpmath.mpf(chi_raw)
                gamma_raw, where = reader.next("gamma")
                gamma = tuple(mpmath.mpf(g) for g in gamma_raw.split(","))
            except ValueError as exc:
                if isinstance(exc, BasisFileError):
                    raise
                raise BasisFileError(f"unparsable number at {where}") from None
            modes.append(ProlateMode(n, lam, gamma, chi))
    if reader.pos < len(reader.lines) - 1:
        raise BasisFileError(f"trailing content at byte offset {reader.offset}")

    basis = ProlateBasis(c, tuple(modes), N, bits)
    try:
        validate_basis(basis)
    except ValueError as exc:
        raise BasisFileError(f"invariant violation: {exc}") from None
    return basis


def load_basis(path):
    return loads_basis(Path(path).read_bytes().decode("ascii"))
