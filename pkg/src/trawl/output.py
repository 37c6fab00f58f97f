"""Unique-neighbor elimination and the two output layouts.

Final-samples layout: one line per sample holding roots followed by
every sampled vertex in step order. Per-step layout: a roots block then
one block per step, each listing every sample's vertices for that step.
Both layouts carry the same total vertex count and translate dense ids
back to the input file's original ids through the loader's remap table.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import NULL_VERTEX, Sample

LAYOUT_FINAL = "final"
LAYOUT_PER_STEP = "per-step"

OUTPUT_MAGIC = b"NDSO"
OUTPUT_VERSION = 1


def dedup_step(sample: Sample, step: int) -> Sample:
    """Replace a step's slots with their sorted distinct non-NULL values."""
    sv = sample.step_vertices[step]
    sample.step_vertices[step] = np.unique(sv[sv != NULL_VERTEX])
    return sample


def fallback_check(sample: Sample, step: int, m_i: int) -> bool:
    """After dedup, samples left with fewer distinct vertices than the
    step size are cheaper to run sample-parallel next step."""
    if step >= len(sample.step_vertices):
        return False
    distinct = len(sample.step_vertices[step])
    return 0 < distinct < m_i


@dataclass
class SampleSetOutput:
    """Final results of one engine run."""

    samples: list
    remap: np.ndarray
    n_steps: int = 0
    stats: Optional[object] = None  # RunStats from the engine

    def final_rows(self) -> list[np.ndarray]:
        """Per-sample row: roots then sampled vertices, original ids."""
        return [self.remap[s.final_vertices()] for s in self.samples]

    def step_rows(self, step: int) -> list[np.ndarray]:
        """Per-sample vertices of one step (-1 selects the roots block)."""
        out = []
        for s in self.samples:
            if step == -1:
                out.append(self.remap[s.roots])
            elif step < len(s.step_vertices):
                out.append(self.remap[s.vertices_at(step)])
            else:
                out.append(np.empty(0, dtype=np.int64))
        return out

    def total_vertices(self) -> int:
        return sum(len(r) for r in self.final_rows())


def _fmt_row(sample_id: int, ids: np.ndarray) -> str:
    return f"{sample_id}: " + " ".join(str(int(v)) for v in ids)


def render_text(output: SampleSetOutput, layout: str) -> str:
    lines = [f"# layout={layout}"]
    if layout == LAYOUT_FINAL:
        for s, row in zip(output.samples, output.final_rows()):
            lines.append(_fmt_row(s.id, row))
    elif layout == LAYOUT_PER_STEP:
        if output.samples:
            lines.append("roots:")
            for s, row in zip(output.samples, output.step_rows(-1)):
                lines.append(_fmt_row(s.id, row))
            for step in range(output.n_steps):
                lines.append(f"step {step}:")
                for s, row in zip(output.samples, output.step_rows(step)):
                    lines.append(_fmt_row(s.id, row))
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return "\n".join(lines) + "\n"


def emit(output: SampleSetOutput, layout: str, path) -> None:
    text = render_text(output, layout)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _blocks_for(output: SampleSetOutput, layout: str) -> list[list[np.ndarray]]:
    if layout == LAYOUT_FINAL:
        return [output.final_rows()]
    return [output.step_rows(-1)] + [output.step_rows(i)
                                     for i in range(output.n_steps)]


def write_binary(output: SampleSetOutput, layout: str, path) -> None:
    """Binary layout: magic, version, layout code, sample/block counts,
    then per block little-endian offsets and id arrays."""
    blocks = _blocks_for(output, layout)
    with open(path, "wb") as fh:
        fh.write(OUTPUT_MAGIC)
        fh.write(struct.pack("<II", OUTPUT_VERSION,
                             0 if layout == LAYOUT_FINAL else 1))
        fh.write(struct.pack("<QQ", len(output.samples), len(blocks)))
        for block in blocks:
            offsets = np.zeros(len(block) + 1, dtype="<u8")
            offsets[1:] = np.cumsum([len(r) for r in block])
            fh.write(offsets.tobytes())
            for row in block:
                fh.write(np.asarray(row, dtype="<i8").tobytes())


def read_binary(path):
    """Inverse of write_binary: returns (layout, blocks of row arrays)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != OUTPUT_MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        version, layout_code = struct.unpack("<II", fh.read(8))
        if version != OUTPUT_VERSION:
            raise ValueError(f"unsupported version {version}")
        n_samples, n_blocks = struct.unpack("<QQ", fh.read(16))
        blocks = []
        for _ in range(n_blocks):
            offsets = np.frombuffer(fh.read(8 * (n_samples + 1)), dtype="<u8")
            total = int(offsets[-1])
            flat = np.frombuffer(fh.read(8 * total), dtype="<i8").astype(np.int64)
            blocks.append([flat[int(offsets[i]):int(offsets[i + 1])]
                           for i in range(n_samples)])
    return (LAYOUT_FINAL if layout_code == 0 else LAYOUT_PER_STEP), blocks


def write_remap(remap: np.ndarray, path) -> None:
    """Sidecar table translating dense ids back to input-file ids."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# dense original\n")
        for dense, orig in enumerate(remap):
            fh.write(f"{dense} {int(orig)}\n")
