"""
Bundled robot descriptions and excitation specs.

UR3e and UR10e report motor currents; Gen3 and FR3 report joint torques. FR3
uses the modified DH convention, the others the traditional one. Gen3 is
described by eight DH rows whose first articulation is static.
"""

import json
from pathlib import Path
from typing import List

from config import settings
from energy_model.datasets.files import atomic_write, load_robot_description, load_sinusoid_spec

ROBOTS = ("ur3e", "ur10e", "gen3", "fr3")
REFERENCE_RESULTS = "reference_results.json"


def robot_path(name: str) -> Path:
    key = name.lower()
    if key not in ROBOTS:
        raise KeyError(f"no bundled robot named {name!r}; available: {', '.join(ROBOTS)}")
    return settings.FIXTURES_DIR / f"{key}.json"


def sinusoid_path(name: str) -> Path:
    return robot_path(name).with_name(f"{name.lower()}_sinusoid.json")


def load_robot(name: str):
    return load_robot_description(robot_path(name))


def load_sinusoid(name: str):
    return load_sinusoid_spec(sinusoid_path(name))


def reference_results() -> dict:
    """Published real-robot results, for context only."""
    return json.loads((settings.FIXTURES_DIR / REFERENCE_RESULTS).read_text())


def export(out_dir) -> List[Path]:
    """Copy every bundled fixture into ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    sources = [robot_path(name) for name in ROBOTS] + [sinusoid_path(name) for name in ROBOTS]
    sources.append(settings.FIXTURES_DIR / REFERENCE_RESULTS)
    written = []
    for source in sources:
        target = out_dir / source.name
        with atomic_write(target) as stream:
            stream.write(source.read_text())
        written.append(target)
    return written
