"""Discrete contour-stencil templates and per-patch orientation signatures.

A stencil template is a list of weighted pixel pairs inside a 5x5 footprint;
its response on a patch is

    response = sum_over_pairs  weight * |patch[a] - patch[b]|

which estimates total variation along one candidate contour orientation
(Getreuer, "Image Interpolation with Contour Stencils", IPOL 2011). A bank
holds 24 templates: 3 orientation classes (1 = horizontal-dominant,
2 = vertical-dominant, 3 = diagonal-dominant) with 8 templates each. The
signature of a patch is its 24 responses in (class, index) order plus the
argmin template; responses are shift-invariant and positively homogeneous in
the patch intensities, so the argmin is invariant under positive affine
intensity maps.

Banks are defined by a plain-text data file (see the packaged
``data/stencil_bank_v1.txt``), making the template set inspectable and
swappable without code changes. Parsing is strict: duplicate (class, index)
slots, offsets outside the footprint, or negative weights are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import BankParseError, BankValidationError

FOOTPRINT = 5
N_CLASSES = 3
N_PER_CLASS = 8
N_TEMPLATES = N_CLASSES * N_PER_CLASS

DEFAULT_BANK_RESOURCE = "stencil_bank_v1.txt"


@dataclass(frozen=True)
class StencilTemplate:
    """One weighted pixel-pair template.

    pairs holds (row_a, col_a, row_b, col_b, weight) tuples with offsets
    relative to the patch center, each in [-2, 2].
    """

    class_d: int
    index_k: int
    pairs: tuple


@dataclass(frozen=True)
class StencilBank:
    """All 24 templates, ordered by (class_d, index_k), plus a version tag."""

    templates: tuple
    version: str
    footprint: int = FOOTPRINT

    def template(self, class_d: int, index_k: int) -> StencilTemplate:
        return self.templates[(class_d - 1) * N_PER_CLASS + (index_k - 1)]


@dataclass(frozen=True)
class StencilSignature:
    """24 template responses for one patch and the winning template slot."""

    responses: tuple
    best: tuple  # (class_d, index_k)
    bank_version: str


def build_default_bank(data: str) -> StencilBank:
    """Parse template data file contents into a validated bank.

    Raises BankParseError (with a line number) on malformed syntax and
    BankValidationError when the contents violate a bank invariant.
    """
    lines = data.splitlines()
    pos = 0

    def next_content_line():
        nonlocal pos
        while pos < len(lines):
            pos += 1
            stripped = lines[pos - 1].strip()
            if stripped and not stripped.startswith("#"):
                return pos, stripped
        return None, None

    line_no, header = next_content_line()
    if header is None:
        raise BankParseError(1, "empty bank file")
    parts = header.split()
    if len(parts) != 5 or parts[0] != "stencil-bank" or parts[2] != "footprint":
        raise BankParseError(line_no, f"bad header {header!r}")
    version = parts[1]
    try:
        fsize = (int(parts[3]), int(parts[4]))
    except ValueError:
        raise BankParseError(line_no, "non-integer footprint") from None
    if fsize != (FOOTPRINT, FOOTPRINT):
        raise BankValidationError(
            f"unsupported footprint {fsize[0]}x{fsize[1]}; v1 banks are 5x5"
        )

    half = FOOTPRINT // 2
    seen = {}
    while True:
        line_no, line = next_content_line()
        if line is None:
            break
        parts = line.split()
        if parts[0] != "template" or len(parts) != 4:
            raise BankParseError(line_no, f"expected 'template <d> <k> <npairs>', got {line!r}")
        try:
            class_d, index_k, npairs = (int(p) for p in parts[1:])
        except ValueError:
            raise BankParseError(line_no, "non-integer template header fields") from None
        if not 1 <= class_d <= N_CLASSES or not 1 <= index_k <= N_PER_CLASS:
            raise BankValidationError(
                f"template class/index ({class_d},{index_k}) outside 1..3 x 1..8"
            )
        if npairs < 1:
            raise BankValidationError(f"template ({class_d},{index_k}) declares no pairs")
        pairs = []
        for _ in range(npairs):
            line_no, line = next_content_line()
            if line is None:
                raise BankParseError(len(lines), "unexpected end of file inside template")
            parts = line.split()
            if len(parts) != 5:
                raise BankParseError(line_no, f"expected '<ra> <ca> <rb> <cb> <weight>', got {line!r}")
            try:
                ra, ca, rb, cb = (int(p) for p in parts[:4])
                weight = float(parts[4])
            except ValueError:
                raise BankParseError(line_no, f"malformed pair line {line!r}") from None
            for off in (ra, ca, rb, cb):
                if not -half <= off <= half:
                    raise BankValidationError(
                        f"template ({class_d},{index_k}): offset {off} outside footprint"
                    )
            if not weight >= 0.0:
                raise BankValidationError(
                    f"template ({class_d},{index_k}): negative weight {weight}"
                )
            pairs.append((ra, ca, rb, cb, weight))
        if (class_d, index_k) in seen:
            raise BankValidationError(f"duplicate template ({class_d},{index_k})")
        if not any(p[4] > 0.0 for p in pairs):
            raise BankValidationError(
                f"template ({class_d},{index_k}) has no positive weight"
            )
        seen[(class_d, index_k)] = StencilTemplate(class_d, index_k, tuple(pairs))

    if len(seen) != N_TEMPLATES:
        missing = [
            (d, k)
            for d in range(1, N_CLASSES + 1)
            for k in range(1, N_PER_CLASS + 1)
            if (d, k) not in seen
        ]
        raise BankValidationError(f"bank has {len(seen)} templates; missing {missing}")
    ordered = tuple(
        seen[(d, k)]
        for d in range(1, N_CLASSES + 1)
        for k in range(1, N_PER_CLASS + 1)
    )
    return StencilBank(templates=ordered, version=version)


def load_bank(path) -> StencilBank:
    with open(path, "r", encoding="utf-8") as fh:
        return build_default_bank(fh.read())


@lru_cache(maxsize=1)
def default_bank() -> StencilBank:
    """The packaged 24-template bank (cached; banks are immutable)."""
    text = (
        resources.files("tvsr").joinpath("data").joinpath(DEFAULT_BANK_RESOURCE)
    ).read_text("utf-8")
    return build_default_bank(text)


def stencil_response(patch, template: StencilTemplate) -> float:
    """Weighted sum of absolute pixel-pair differences on a 5x5 patch.

    Accumulation runs in the template's pair order so that results are
    bit-reproducible against the image-wide vectorized pass.
    """
    patch = np.asarray(patch, dtype=np.float64)
    if patch.shape != (FOOTPRINT, FOOTPRINT):
        raise ValueError(
            f"patch shape {patch.shape} does not match footprint {FOOTPRINT}x{FOOTPRINT}"
        )
    half = FOOTPRINT // 2
    grid = patch.tolist()
    total = 0.0
    for ra, ca, rb, cb, weight in template.pairs:
        diff = grid[ra + half][ca + half] - grid[rb + half][cb + half]
        total += weight * (diff if diff >= 0.0 else -diff)
    return total


def signature(patch, bank: StencilBank) -> StencilSignature:
    """All 24 responses plus the argmin slot (ties: lowest (class, index))."""
    responses = tuple(stencil_response(patch, t) for t in bank.templates)
    best_i = 0
    for i in range(1, N_TEMPLATES):
        if responses[i] < responses[best_i]:
            best_i = i
    best = (best_i // N_PER_CLASS + 1, best_i % N_PER_CLASS + 1)
    return StencilSignature(responses=responses, best=best, bank_version=bank.version)


def signature_distance(p: StencilSignature, q: StencilSignature) -> float:
    """Euclidean distance between two 24-element response vectors."""
    if p.bank_version != q.bank_version:
        raise ValueError(
            f"signatures from different banks: {p.bank_version!r} vs {q.bank_version!r}"
        )
    acc = 0.0
    for a, b in zip(p.responses, q.responses):
        diff = a - b
        acc += diff * diff
    return math.sqrt(acc)
