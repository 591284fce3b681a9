"""File formats: kernels, blocked systems, signals, continuous specs,
circuits, spectra and reports.

Binary containers open with a 5-byte magic (``PTVK\\x01`` for kernels,
``PTVM\\x01`` for blocked systems) followed by a length-prefixed JSON header
and the taps as little-endian float64 in C (row-major) order, so a header
change can never be misread as tap data.  Text formats are JSON with sorted
keys and CSV with ``repr`` floats — shortest strings that parse back to the
identical double — which makes every writer byte-deterministic: the same
object always serializes to the same bytes.

Signals travel either as CSV (header ``t,ch0,ch1,...``; one row per frame)
for small human-readable cases, or as raw interleaved float64 frames with a
JSON sidecar ``<path>.json`` holding ``{channels, origin_index,
sample_period_s}`` for bulk data.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .continuous import (ContinuousSpec, DiracDelta, FirTable, Gate, SeparableTerm)
from .errors import InvalidArgument
from .kernel import BlockedMimo, PeriodicKernel, Signal
from .spectrum import HybridSpectrum

KERNEL_MAGIC = b"PTVK\x01"
MIMO_MAGIC = b"PTVM\x01"


def _dump_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def _write_container(path, magic: bytes, header: dict, taps: np.ndarray) -> None:
    blob = _dump_json(header)
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(taps, dtype="<f8").tobytes())


def _read_container(path, magic: bytes) -> tuple[dict, np.ndarray]:
    data = Path(path).read_bytes()
    if data[:5] != magic:
        raise InvalidArgument(f"{path}: bad magic {data[:5]!r}, expected {magic!r}")
    (header_len,) = struct.unpack_from("<I", data, 5)
    header = json.loads(data[9:9 + header_len])
    taps = np.frombuffer(data[9 + header_len:], dtype="<f8")
    return header, taps


def write_kernel(path, kernel: PeriodicKernel) -> None:
    header = {"n_out": kernel.n_out, "n_in": kernel.n_in, "period": kernel.period,
              "lag_min": kernel.lag_min, "lag_max": kernel.lag_max}
    if kernel.sample_period_s is not None:
        header["sample_period_s"] = kernel.sample_period_s
    _write_container(path, KERNEL_MAGIC, header, kernel.taps)


def read_kernel(path) -> PeriodicKernel:
    header, taps = _read_container(path, KERNEL_MAGIC)
    shape = (header["n_out"], header["n_in"], header["period"],
             header["lag_max"] - header["lag_min"] + 1)
    return PeriodicKernel(taps.reshape(shape), header["lag_min"],
                          header.get("sample_period_s"))


def write_kernel_json(path, kernel: PeriodicKernel) -> None:
    """Human-inspectable twin of :func:`write_kernel` (same field names)."""
    payload = kernel_to_dict(kernel)
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def read_kernel_json(path) -> PeriodicKernel:
    return kernel_from_dict(json.loads(Path(path).read_text()))


def kernel_to_dict(kernel: PeriodicKernel) -> dict:
    payload = {"n_out": kernel.n_out, "n_in": kernel.n_in, "period": kernel.period,
               "lag_min": kernel.lag_min, "lag_max": kernel.lag_max,
               "taps": kernel.taps.tolist()}
    if kernel.sample_period_s is not None:
        payload["sample_period_s"] = kernel.sample_period_s
    return payload


def kernel_from_dict(payload: dict) -> PeriodicKernel:
    return PeriodicKernel(np.asarray(payload["taps"]), payload["lag_min"],
                          payload.get("sample_period_s"))


def write_mimo(path, blocked: BlockedMimo) -> None:
    header = {"dim": blocked.dim, "lag_min": blocked.lag_min, "lag_max": blocked.lag_max}
    _write_container(path, MIMO_MAGIC, header, blocked.taps)


def read_mimo(path) -> BlockedMimo:
    header, taps = _read_container(path, MIMO_MAGIC)
    shape = (header["dim"], header["dim"], header["lag_max"] - header["lag_min"] + 1)
    return BlockedMimo(taps.reshape(shape), header["lag_min"])


def sniff_magic(path) -> bytes:
    """First five bytes of a file — compare against the module's magics."""
    with open(path, "rb") as fh:
        return fh.read(5)


def write_signal_csv(path, signal: Signal) -> None:
    step = signal.sample_period_s if signal.sample_period_s is not None else 1.0
    lines = ["t," + ",".join(f"ch{j}" for j in range(signal.n_channels))]
    for row in range(signal.n_samples):
        t = float((signal.origin_index + row) * step)
        lines.append(",".join([repr(t)] + [repr(float(v)) for v in signal.data[:, row]]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path) -> Signal:
    lines = Path(path).read_text().strip().splitlines()
    if len(lines) < 2:
        raise InvalidArgument(f"{path}: signal CSV needs a header and at least one row")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    times, data = rows[:, 0], rows[:, 1:].T
    step = times[1] - times[0] if len(times) > 1 else 1.0
    if not step > 0:
        raise InvalidArgument(f"{path}: time column is not increasing")
    origin = int(round(times[0] / step))
    return Signal(data, step, origin)


def write_signal_raw(path, signal: Signal) -> None:
    Path(path).write_bytes(np.ascontiguousarray(signal.data.T, dtype="<f8").tobytes())
    sidecar = {"channels": signal.n_channels, "origin_index": signal.origin_index,
               "sample_period_s": signal.sample_period_s}
    Path(str(path) + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=1) + "\n")


def read_signal_raw(path) -> Signal:
    sidecar = json.loads(Path(str(path) + ".json").read_text())
    frames = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
    channels = int(sidecar["channels"])
    if channels < 1 or frames.size % channels:
        raise InvalidArgument(f"{path}: {frames.size} values do not fill {channels} channels")
    data = frames.reshape(frames.size // channels, channels).T
    return Signal(data, sidecar.get("sample_period_s"), sidecar.get("origin_index", 0))


def write_signal(path, signal: Signal) -> None:
    """Dispatch on extension: ``.csv`` writes CSV, anything else raw+sidecar."""
    if str(path).endswith(".csv"):
        write_signal_csv(path, signal)
    else:
        write_signal_raw(path, signal)


def read_signal(path) -> Signal:
    if str(path).endswith(".csv"):
        return read_signal_csv(path)
    return read_signal_raw(path)


def spec_to_dict(spec: ContinuousSpec) -> dict:
    entries = []
    for row in spec.entries:
        out_row = []
        for cell in row:
            terms = []
            for term in cell:
                item = {"harmonics": [{"k": k, "re": c.real, "im": c.imag}
                                      for k, c in term.harmonics]}
                if isinstance(term.tau_part, DiracDelta):
                    item["tau"] = {"delta": {"delay_s": term.tau_part.delay_s}}
                else:
                    item["tau"] = {"fir": {"taps": list(term.tau_part.taps),
                                           "tap_period_s": term.tau_part.tap_period_s}}
                if term.gate is not None:
                    item["gate"] = {"z_a": term.gate.z_a, "z_b": term.gate.z_b}
                terms.append(item)
            out_row.append(terms)
        entries.append(out_row)
    return {"n_out": spec.n_out, "n_in": spec.n_in, "period_s": spec.period_s,
            "entries": entries}


def spec_from_dict(payload: dict) -> ContinuousSpec:
    entries = []
    for row in payload["entries"]:
        out_row = []
        for cell in row:
            terms = []
            for item in cell:
                harmonics = {h["k"]: complex(h["re"], h.get("im", 0.0))
                             for h in item["harmonics"]}
                tau = item["tau"]
                if "delta" in tau:
                    tau_part = DiracDelta(float(tau["delta"]["delay_s"]))
                elif "fir" in tau:
                    tau_part = FirTable(tuple(tau["fir"]["taps"]),
                                        float(tau["fir"]["tap_period_s"]))
                else:
                    raise InvalidArgument(f"unknown tau part {sorted(tau)!r}")
                gate = None
                if "gate" in item:
                    gate = Gate(float(item["gate"]["z_a"]), float(item["gate"]["z_b"]))
                terms.append(SeparableTerm(harmonics, tau_part, gate))
            out_row.append(terms)
        entries.append(out_row)
    return ContinuousSpec(payload["n_out"], payload["n_in"], payload["period_s"], entries)


def write_spec_json(path, spec: ContinuousSpec) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), sort_keys=True, indent=1) + "\n")


def read_spec_json(path) -> ContinuousSpec:
    return spec_from_dict(json.loads(Path(path).read_text()))


def read_circuit_json(path) -> tuple[dict, list]:
    """Load a circuit file: ``{nodes: [{id, kind, payload|path}], edges:
    [{from, to}]}``.  Node kinds: ``kernel`` (inline dict or a kernel file
    path), ``spec`` (inline dict or a spec JSON path), ``fir`` (inline
    ``{taps: [...]}``).  Returns (ordered id->object mapping, edge list)
    ready for :func:`ptv.compose.reduce_circuit`."""
    payload = json.loads(Path(path).read_text())
    base = Path(path).parent
    nodes = {}
    for node in payload["nodes"]:
        nid = str(node["id"])
        kind = node["kind"]
        if nid in nodes:
            raise InvalidArgument(f"duplicate node id {nid!r}")
        if kind == "kernel":
            if "path" in node:
                target = base / node["path"]
                nodes[nid] = (read_kernel(target) if sniff_magic(target) == KERNEL_MAGIC
                              else read_kernel_json(target))
            else:
                nodes[nid] = kernel_from_dict(node["payload"])
        elif kind == "spec":
            nodes[nid] = (read_spec_json(base / node["path"]) if "path" in node
                          else spec_from_dict(node["payload"]))
        elif kind == "fir":
            nodes[nid] = [float(t) for t in node["payload"]["taps"]]
        else:
            raise InvalidArgument(f"node {nid!r}: unknown kind {kind!r}")
    edges = [(str(e["from"]), str(e["to"])) for e in payload["edges"]]
    return nodes, edges


def write_spectrum_csv(path, spectrum: HybridSpectrum) -> None:
    lines = ["i,j,k,f,re,im"]
    for i in range(spectrum.n_out):
        for j in range(spectrum.n_in):
            for ki, k in enumerate(spectrum.harmonic_axis):
                for fi, f in enumerate(spectrum.freq_axis):
                    v = spectrum.values[i, j, ki, fi]
                    lines.append(f"{i},{j},{int(k)},{float(f)!r},"
                                 f"{float(v.real)!r},{float(v.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_report_json(path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
