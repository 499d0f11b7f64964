"""Deterministic serialization: trajectory CSV and report/certificate JSON.

Numbers are written in scientific notation with 17 significant digits, so
re-reading reproduces every float bit-for-bit.  JSON objects are dumped
with sorted keys and no timestamps; identical inputs yield byte-identical
files.  All writes go through a temp-file-then-rename so readers never see
partial output.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import ConfigError
from .spectral import SpectralModel, Trajectory

__all__ = [
    "write_text_atomic",
    "write_json_atomic",
    "trajectory_to_csv",
    "trajectory_from_csv",
]

_FMT = "{:.17e}"


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: str, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def trajectory_to_csv(path: str, traj: Trajectory, model: SpectralModel) -> None:
    """Write t, per-slot position/velocity, and the product norm per row.

    Columns follow the sorted eigenvalue order with multiplicity copies
    suffixed: pos_<eig>_<copy>, vel_<eig>_<copy>.  Coefficients are written
    as real numbers; complex trajectories must carry only roundoff-level
    imaginary parts (checked, 1e-9 relative).
    """
    pos = traj.position
    vel = traj.velocity
    if np.iscomplexobj(pos) or np.iscomplexobj(vel):
        scale = max(1.0, float(np.max(np.abs(pos))), float(np.max(np.abs(vel))))
        residue = max(float(np.max(np.abs(pos.imag))), float(np.max(np.abs(vel.imag))))
        if residue > 1e-9 * scale:
            raise ValueError(
                f"trajectory has non-negligible imaginary parts ({residue:g}); "
                "CSV export stores real coefficients only"
            )
        pos = pos.real
        vel = vel.real
    if pos.shape[1] != model.mode_count:
        raise ConfigError("trajectory does not match the model's mode count")
    header = ["t"]
    for j, k in model.slot_labels:
        header.append(f"pos_{j}_{k}")
        header.append(f"vel_{j}_{k}")
    header.append("norm_E")
    norms = Trajectory(traj.t0, traj.dt, pos, vel).norms(model)
    times = traj.times
    lines = [",".join(header)]
    for i in range(traj.n_nodes):
        row = [_FMT.format(times[i])]
        for m in range(model.mode_count):
            row.append(_FMT.format(pos[i, m]))
            row.append(_FMT.format(vel[i, m]))
        row.append(_FMT.format(norms[i]))
        lines.append(",".join(row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def trajectory_from_csv(path: str) -> Trajectory:
    """Re-read a trajectory CSV written by trajectory_to_csv."""
    with open(path, "r") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not rows:
        raise ConfigError(f"{path}: empty trajectory file")
    n_cols = len(header)
    if n_cols < 4 or (n_cols - 2) % 2 != 0:
        raise ConfigError(f"{path}: unexpected trajectory column layout")
    n_modes = (n_cols - 2) // 2
    data = np.array([[float(x) for x in row] for row in rows])
    if data.shape[1] != n_cols:
        raise ConfigError(f"{path}: ragged trajectory rows")
    times = data[:, 0]
    pos = data[:, 1 : 1 + 2 * n_modes : 2]
    vel = data[:, 2 : 2 + 2 * n_modes : 2]
    if times.size < 2:
        raise ConfigError(f"{path}: need at least two grid nodes")
    dt = float(times[1] - times[0])
    return Trajectory(float(times[0]), dt, pos.copy(), vel.copy())
