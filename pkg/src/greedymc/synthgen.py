"""Seeded generation of synthetic benchmark instances.

An instance is a square rank-r matrix built as the product of two n-by-r
standard Gaussian factors, observed on a uniform random mask, with a chosen
fraction of the observed entries corrupted.  Two corruption models are
supported: ``additive_gaussian`` adds N(0, 1) draws to the true values, and
``uniform_range`` replaces values with draws uniform between the minimum and
maximum of the uncorrupted observed entries.

Randomness is split into four sub-streams derived from the instance seed
(factors, mask, corruption support, corruption magnitudes, in that order),
so e.g. changing the error rate never perturbs the mask.  Fractional counts
are rounded half-up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .masking import MaskedMatrix, ObservationMask, project

ERROR_MODELS = ("additive_gaussian", "uniform_range")

_MAGIC = "greedymc-instance 1"


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters of one synthetic instance (square n x n, rank < n)."""

    n: int
    rank: int
    density: float
    error_rate: float
    error_model: str
    seed: int
    additive: bool = True  # additive_gaussian only: add to (True) or replace (False) the entry

    def __post_init__(self):
        if self.n < 2:
            raise ArgumentError("n must be at least 2")
        if not 1 <= self.rank < self.n:
            raise ArgumentError("rank must satisfy 1 <= rank < n")
        if not 0 < self.density <= 1:
            raise ArgumentError("density must be in (0, 1]")
        if not 0 <= self.error_rate < 1:
            raise ArgumentError("error_rate must be in [0, 1)")
        if self.error_model not in ERROR_MODELS:
            raise ArgumentError(f"error_model must be one of {ERROR_MODELS}")
        if not 0 <= self.seed < 2**64:
            raise ArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class Instance:
    """A generated instance: ground truth, corrupted observations, support."""

    truth: np.ndarray
    observed: MaskedMatrix
    corruption_support: ObservationMask
    spec: InstanceSpec = field(repr=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.spec == other.spec
            and np.array_equal(self.truth, other.truth)
            and self.observed == other.observed
            and self.corruption_support == other.corruption_support
        )


def split_streams(seed: int) -> tuple[np.random.Generator, ...]:
    """Four independent generators: factors, mask, support, magnitudes."""
    children = np.random.SeedSequence(seed).spawn(4)
    return tuple(np.random.default_rng(c) for c in children)


def gen_lowrank(n: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Product of two independent n-by-rank standard Gaussian factors."""
    if not 1 <= rank < n:
        raise ArgumentError("rank must satisfy 1 <= rank < n")
    u = rng.standard_normal((n, rank))
    v = rng.standard_normal((n, rank))
    return u @ v.T


def gen_mask(n: int, density: float, rng: np.random.Generator) -> ObservationMask:
    """Uniform mask with exactly round(density * n^2) entries."""
    if not 0 < density <= 1:
        raise ArgumentError("density must be in (0, 1]")
    count = _round_half_up(density * n * n)
    flat = np.sort(rng.choice(n * n, size=count, replace=False)).astype(np.int64)
    return ObservationMask(n, n, flat)


def corrupt(
    truth: np.ndarray,
    mask: ObservationMask,
    error_rate: float,
    model: str,
    support_rng: np.random.Generator,
    value_rng: np.random.Generator,
    additive: bool = True,
) -> tuple[MaskedMatrix, ObservationMask]:
    """Corrupt round(error_rate * |mask|) observed entries.

    Returns the corrupted masked matrix and the exact corruption support.
    The two generators keep support selection and magnitude draws on
    separate streams.
    """
    if not 0 <= error_rate < 1:
        raise ArgumentError("error_rate must be in [0, 1)")
    if model not in ERROR_MODELS:
        raise ArgumentError(f"error_model must be one of {ERROR_MODELS}")
    clean = project(truth, mask)
    count = _round_half_up(error_rate * mask.size)
    picks = support_rng.choice(mask.size, size=count, replace=False)
    support_flat = np.sort(mask.flat[picks])
    support = ObservationMask(mask.rows, mask.cols, support_flat)

    values = clean.copy()
    if count:
        if model == "additive_gaussian":
            draws = value_rng.standard_normal(count)
            if additive:
                values.ravel()[support_flat] += draws
            else:
                values.ravel()[support_flat] = draws
        else:  # uniform_range
            observed = clean.ravel()[mask.flat]
            lo, hi = float(observed.min()), float(observed.max())
            values.ravel()[support_flat] = value_rng.uniform(lo, hi, count)
    return MaskedMatrix(values, mask), support


def generate(spec: InstanceSpec) -> Instance:
    """Deterministically build the instance described by ``spec``."""
    factors_rng, mask_rng, support_rng, value_rng = split_streams(spec.seed)
    truth = gen_lowrank(spec.n, spec.rank, factors_rng)
    mask = gen_mask(spec.n, spec.density, mask_rng)
    observed, support = corrupt(
        truth, mask, spec.error_rate, spec.error_model,
        support_rng, value_rng, additive=spec.additive,
    )
    return Instance(truth=truth, observed=observed, corruption_support=support, spec=spec)


def write_instance(instance: Instance, path) -> None:
    """Write an instance file (bit-exact round trip with read_instance).

    Layout: ASCII header of spec fields, a ``truth`` marker followed by the
    truth matrix as raw little-endian float64 in row-major order, the mask
    as ``row,col`` lines, then corruption records as ``row,col,value``.
    """
    spec = instance.spec
    header = [
        _MAGIC,
        f"n={spec.n}",
        f"rank={spec.rank}",
        f"density={spec.density!r}",
        f"error_rate={spec.error_rate!r}",
        f"error_model={spec.error_model}",
        f"additive={int(spec.additive)}",
        f"seed={spec.seed}",
        "truth",
    ]
    support = instance.corruption_support
    corrupted_values = instance.observed.values.ravel()[support.flat]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(instance.truth, dtype="<f8").tobytes())
        mask_lines = instance.observed.mask.to_lines()
        fh.write(f"mask {len(mask_lines)}\n".encode("ascii"))
        if mask_lines:
            fh.write(("\n".join(mask_lines) + "\n").encode("ascii"))
        records = [
            f"{r},{c},{float(v)!r}"
            for (r, c), v in zip(support.pairs(), corrupted_values)
        ]
        fh.write(f"corruption {len(records)}\n".encode("ascii"))
        if records:
            fh.write(("\n".join(records) + "\n").encode("ascii"))


def _read_header_line(fh) -> str:
    raw = fh.readline()
    if not raw:
        raise ArgumentError("truncated instance file")
    return raw.decode("ascii").rstrip("\n")


def read_instance(path) -> Instance:
    """Parse an instance file written by :func:`write_instance`."""
    with open(path, "rb") as fh:
        if _read_header_line(fh) != _MAGIC:
            raise ArgumentError("not a greedymc instance file")
        fields: dict[str, str] = {}
        while True:
            line = _read_header_line(fh)
            if line == "truth":
                break
            key, _, value = line.partition("=")
            fields[key] = value
        try:
            spec = InstanceSpec(
                n=int(fields["n"]),
                rank=int(fields["rank"]),
                density=float(fields["density"]),
                error_rate=float(fields["error_rate"]),
                error_model=fields["error_model"],
                seed=int(fields["seed"]),
                additive=bool(int(fields["additive"])),
            )
        except KeyError as exc:
            raise ArgumentError(f"instance header missing field {exc}") from exc
        n = spec.n
        raw = fh.read(n * n * 8)
        if len(raw) != n * n * 8:
            raise ArgumentError("truncated truth section")
        truth = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(n, n)

        tag, _, count = _read_header_line(fh).partition(" ")
        if tag != "mask":
            raise ArgumentError("expected mask section")
        mask = ObservationMask.from_lines(
            n, n, (_read_header_line(fh) for _ in range(int(count)))
        )

        tag, _, count = _read_header_line(fh).partition(" ")
        if tag != "corruption":
            raise ArgumentError("expected corruption section")
        support_pairs = []
        values = np.zeros(n * n)
        values[mask.flat] = truth.ravel()[mask.flat]
        for _ in range(int(count)):
            line = _read_header_line(fh)
            try:
                r, c, v = line.split(",")
                r, c = int(r), int(c)
            except ValueError as exc:
                raise ArgumentError(f"malformed corruption record: {line!r}") from exc
            support_pairs.append((r, c))
            values[r * n + c] = float(v)
    support = ObservationMask.from_pairs(n, n, support_pairs)
    if not support.issubset(mask):
        raise ArgumentError("corruption support is not contained in the mask")
    observed = MaskedMatrix(values.reshape(n, n), mask)
    return Instance(truth=truth, observed=observed, corruption_support=support, spec=spec)
