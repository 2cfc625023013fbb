"""Flat-file formats: embedding CSVs, utility CSVs, and profile JSONL.

candidates.csv / voters.csv carry a header ``f1,...,fd`` and one vector per
row; utilities.csv carries ``c0,...,c(m-1)``; profile.jsonl holds one JSON
object per voter, either {"ranking": [...]} or {"pairs": [[a, b], ...]}.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import (
    CandidateSet,
    Instance,
    PairwisePrefs,
    Profile,
    Ranking,
    UtilityProfile,
    VoterSet,
)


class ParseError(ValidationError):
    """Malformed input file; carries the offending location in the message."""


def _read_matrix(path: str | Path, prefix: str) -> np.ndarray:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if not header or not header[0].startswith(prefix):
            raise ParseError(f"{path}: expected a '{prefix}...' header, got {header[:3]}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows)


def _write_matrix(path: str | Path, matrix: np.ndarray, prefix: str) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{prefix}{j + (1 if prefix == 'f' else 0)}" for j in range(matrix.shape[1])])
        for row in matrix:
            writer.writerow([f"{x:.17g}" for x in row])


def read_candidates(path: str | Path) -> CandidateSet:
    return CandidateSet(_read_matrix(path, "f"))


def write_candidates(path: str | Path, candidates: CandidateSet) -> None:
    _write_matrix(path, candidates.vectors, "f")


def read_voters(path: str | Path) -> VoterSet:
    return VoterSet(_read_matrix(path, "f"))


def write_voters(path: str | Path, voters: VoterSet) -> None:
    _write_matrix(path, voters.vectors, "f")


def read_utilities(path: str | Path) -> UtilityProfile:
    return UtilityProfile(_read_matrix(path, "c"))


def write_utilities(path: str | Path, utilities: UtilityProfile) -> None:
    _write_matrix(path, utilities.utilities, "c")


def read_profile(path: str | Path, m: int | None = None) -> Profile:
    path = Path(path)
    records = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if "ranking" in obj:
                records.append(Ranking(obj["ranking"]))
            elif "pairs" in obj:
                records.append(PairwisePrefs([tuple(p) for p in obj["pairs"]]))
            else:
                raise ParseError(f"{path}:{lineno}: expected a 'ranking' or 'pairs' key")
    if not records:
        raise ParseError(f"{path}: no voter records")
    return Profile(records, m=m)


def write_profile(path: str | Path, profile: Profile) -> None:
    with Path(path).open("w") as fh:
        for rec in profile.records:
            if isinstance(rec, Ranking):
                fh.write(json.dumps({"ranking": list(rec.order)}) + "\n")
            else:
                fh.write(json.dumps({"pairs": [list(p) for p in rec.pairs]}) + "\n")


def write_instance(directory: str | Path, instance: Instance) -> None:
    """Materialize one instance as the flat-file bundle the CLI consumes."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_candidates(directory / "candidates.csv", instance.candidates)
    if instance.voters is not None:
        write_voters(directory / "voters.csv", instance.voters)
    if instance.utilities is not None:
        write_utilities(directory / "utilities.csv", instance.utilities)
    write_profile(directory / "profile.jsonl", instance.profile)
    meta = dict(instance.meta)
    meta.update({"n": instance.n, "m": instance.m, "d": instance.d, "seed": instance.seed})
    with (directory / "meta.json").open("w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_instance(directory: str | Path) -> Instance:
    directory = Path(directory)
    candidates = read_candidates(directory / "candidates.csv")
    profile = read_profile(directory / "profile.jsonl", m=candidates.m)
    voters = utilities = None
    if (directory / "voters.csv").exists():
        voters = read_voters(directory / "voters.csv")
    if (directory / "utilities.csv").exists():
        utilities = read_utilities(directory / "utilities.csv")
    meta = {}
    if (directory / "meta.json").exists():
        with (directory / "meta.json").open() as fh:
            meta = json.load(fh)
    return Instance(candidates, profile, voters=voters, utilities=utilities, seed=meta.get("seed"), meta=meta)
