"""Content-addressed cache of class sets and Brandt data, format WHK1.

One JSON file per (ramified set, level, order fingerprint).  Payloads hold
exact rationals as strings; the file records a sha256 of the canonical
payload and is rejected (then recomputed) if the hash or schema differs.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from filelock import FileLock

from ..brandt import ClassSet, class_set
from ..lattice import Lattice
from ..quaternion import OrderBasis

SCHEMA = "WHK1"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _lattice(lat: Lattice) -> dict:
    return {"rows": [list(r) for r in lat.rows], "denom": lat.denom}


def _unlattice(data: dict) -> Lattice:
    return Lattice(tuple(tuple(r) for r in data["rows"]), data["denom"])


def order_key(order: OrderBasis) -> dict:
    alg = order.algebra
    return {
        "ramified": list(alg.ramified_primes),
        "level": order.reduced_discriminant,
        "algebra": [alg.a, alg.b],
        "order": _lattice(order.lattice),
    }


def encode_class_set(cs: ClassSet) -> dict:
    theta = {f"{i},{j}": s for (i, j), s in sorted(cs._theta.items()) if i <= j}
    brandt = {}
    if cs._theta_bound:
        from ..brandt import primes_up_to

        for p in primes_up_to(cs._theta_bound):
            if cs.level % p:
                brandt[str(p)] = [list(r) for r in cs.hecke_matrix(p)]
    return {
        "ideals": [_lattice(i) for i in cs.ideals],
        "norms": [str(n) for n in cs.norms],
        "weights": list(cs.weights),
        "neighbor_prime": cs.neighbor_prime,
        "invariants": [list(v) for v in cs._invariants],
        "theta_bound": cs._theta_bound,
        "theta": theta,
        "brandt": brandt,
    }


def decode_class_set(order: OrderBasis, payload: dict) -> ClassSet:
    theta = {}
    for key, series in payload["theta"].items():
        i, j = (int(t) for t in key.split(","))
        theta[(i, j)] = list(series)
        theta[(j, i)] = list(series)
    return ClassSet(
        order,
        tuple(_unlattice(d) for d in payload["ideals"]),
        tuple(Fraction(n) for n in payload["norms"]),
        tuple(payload["weights"]),
        payload["neighbor_prime"],
        tuple(tuple(v) for v in payload["invariants"]),
        theta,
        payload["theta_bound"],
    )


class ClassSetCache:
    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _path(self, key: dict) -> Path:
        return self.directory / f"{sha256(canonical(key))}.whk1.json"

    def load(self, order: OrderBasis) -> ClassSet | None:
        key = order_key(order)
        path = self._path(key)
        if not path.exists():
            return None
        with FileLock(str(path) + ".lock"):
            try:
                entry = json.loads(path.read_text())
            except (OSError, ValueError):
                return None
        if entry.get("schema") != SCHEMA or entry.get("key") != key:
            return None
        payload = entry.get("payload")
        if payload is None or sha256(canonical(payload)) != entry.get("hash"):
            return None
        return decode_class_set(order, payload)

    def store(self, cs: ClassSet) -> Path:
        key = order_key(cs.order)
        payload = encode_class_set(cs)
        entry = {"schema": SCHEMA, "key": key, "payload": payload, "hash": sha256(canonical(payload))}
        path = self._path(key)
        with FileLock(str(path) + ".lock"):
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(canonical(entry))
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return path

    def class_set(self, order: OrderBasis) -> ClassSet:
        cs = self.load(order)
        if cs is not None:
            self.hits += 1
            return cs
        self.misses += 1
        cs = class_set(order)
        self.store(cs)
        return cs

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses}
