"""
Physical constants table
------------------------

Loads the versioned constants file shipped in ``data/planck_constants.txt``.
Values are stored as exact decimal strings; derived Planck units are computed
here so the file never holds rounded duplicates.

Functions
---------
value(key):
    Returns the value of the constant ``key`` as a float.
unit(key):
    Returns the units of the constant ``key``.
planck_units():
    Returns the SI size of one Planck length, time and mass.
table_version() / table_hash():
    Provenance of the loaded table, embedded in every run report.
"""
import hashlib
import logging
import os
import re
from decimal import Decimal
from functools import lru_cache
from typing import Dict, Optional, Tuple

logger = logging.getLogger(__name__)

DEFAULT_TABLE_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "planck_constants.txt"
)

# columns are separated by two or more spaces
_ROW = re.compile(r"^(?P<name>\S.*?)\s{2,}(?P<value>\S+)\s{2,}(?P<unit>.+?)\s*$")
_VERSION = re.compile(r"^#\s*version:\s*(?P<version>\S+)")


class ConstantsTable:
    """Parsed constants file with provenance"""

    def __init__(self, path: str):
        self.path = path
        with open(path, "rb") as f:
            raw = f.read()
        self.sha256 = hashlib.sha256(raw).hexdigest()
        self.version = "unversioned"
        self.entries: Dict[str, Tuple[Decimal, str]] = {}

        for line in raw.decode("utf-8").splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                m = _VERSION.match(line)
                if m:
                    self.version = m.group("version")
                continue
            m = _ROW.match(line)
            if not m:
                raise ValueError(f"malformed constants row in {path}: {line!r}")
            self.entries[m.group("name")] = (Decimal(m.group("value")), m.group("unit"))

        logger.debug("Loaded %d constants from %s (version %s)", len(self.entries), path, self.version)

    def value(self, key: str) -> float:
        try:
            return float(self.entries[key][0])
        except KeyError:
            raise KeyError(f"'{key}' is not in the constants table {self.path}")

    def unit(self, key: str) -> str:
        return self.entries[key][1]


@lru_cache(maxsize=4)
def load_table(path: Optional[str] = None) -> ConstantsTable:
    """Load (and memoize) a constants table; defaults to the shipped file"""
    path = path or os.environ.get("LAB_CONSTANTS_PATH") or DEFAULT_TABLE_PATH
    return ConstantsTable(path)


def value(key: str) -> float:
    return load_table().value(key)


def unit(key: str) -> str:
    return load_table().unit(key)


def planck_units() -> Dict[str, float]:
    """SI size of the Planck length (m), time (s) and mass (kg)"""
    table = load_table()
    c = table.entries["speed of light in vacuum"][0]
    hbar = table.entries["reduced Planck constant"][0]
    l_p = table.entries["Planck length"][0]
    return {
        "length": float(l_p),
        "time": float(l_p / c),
        "mass": float(hbar / (l_p * c)),
    }


def table_version() -> str:
    return load_table().version


def table_hash() -> str:
    return load_table().sha256
