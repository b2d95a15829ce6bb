# Defaults shared by the computational modules and the command line.

import json
import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

# Exact face enumeration visits 2^M - 1 supports; above this only the numeric path runs.
FACE_ENUMERATION_CAP = 12

# Arc-length step of the finite-difference stencils (Richardson uses h and h/2).
FD_STEP = 1e-3

# Random orthonormal frames added to the factor-aligned frame at every sample point.
FRAMES_PER_POINT = 8

# The (lam, mu) grid of the PIC-2 certificate is PIC_GRID_SIZE x PIC_GRID_SIZE over [-1, 1]^2.
PIC_GRID_SIZE = 9

# Significant digits used for floats in reports.
REPORT_DIGITS = 12

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


@dataclass(frozen=True)
class Tolerances:
    """Comparison tolerances.

    :param float_cmp: Tolerance for comparing floats produced by closed-form evaluation.
    :type float_cmp: float
    :param fd_cmp: Tolerance for comparing quantities sourced from finite differences.
    :type fd_cmp: float
    :param feasibility: Feasibility tolerance of the numeric KKT solves (``U_S > -tol``).
    :type feasibility: float
    :param snap: Relative tolerance of the continued-fraction snap to rationals.
    :type snap: float
    :param roundoff: Tolerance for identities that only differ by float round-off.
    :type roundoff: float
    """

    float_cmp: float = 1e-8
    fd_cmp: float = 1e-6
    feasibility: float = 1e-9
    snap: float = 1e-12
    roundoff: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()


def fixture_path(name):
    """Returns the path of a bundled fixture file.

    :param name: File name inside the fixtures directory, e.g. ``'sns1_n2.json'``.
    :type name: str
    :raises NameError: If no bundled fixture has that name.
    :return: The absolute path of the fixture.
    :rtype: pathlib.Path
    """
    path = FIXTURES_DIR / name
    if not path.is_file():
        raise NameError(f"No bundled fixture named '{name}'.")
    return path


def read_json(path):
    """Reads a JSON document and returns the decoded object."""
    path = Path(path)
    log.debug("Reading %s", path)
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_json(data, path):
    """Writes ``data`` as indented JSON with sorted keys and a trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
