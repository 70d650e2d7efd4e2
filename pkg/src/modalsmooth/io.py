"""File formats for simulation and analysis outputs.

CSV column headers are fixed by the ``*_COLUMNS`` constants below.

Binary matrix container (``.msmx``), all fields little-endian::

    offset  type        field
    0       8 bytes     magic b"MSMX0001"
    8       uint32      kind (0 = complex spectrum, 1 = real time series)
    12      uint32      n_slices (frequency bins or time samples)
    16      uint32      rows
    20      uint32      cols
    24      uint32      n_fft
    28      uint32      reserved (0)
    32      float64     fs [Hz]
    40      int64[n]    slice index (DFT bin or sample number)
    ...     float64     data; complex kinds store (re, im) pairs,
                        C order over (slice, row, col)
"""

import csv
import json
import struct

import numpy as np

from .synthesis import SpectrumMatrix

MAGIC = b"MSMX0001"
_HEADER = struct.Struct("<8sIIIIII d")

REFLECTION_COLUMNS = [
    "reflection",
    "delay_s",
    "dor_beta_deg",
    "dor_psi_deg",
    "doa_theta_deg",
    "doa_phi_deg",
    "amplitude",
    "bounce_count",
    "mirror_sx",
    "mirror_sy",
    "mirror_sz",
]
SPECTRUM_COLUMNS = ["bin", "freq_hz", "row", "col", "re", "im"]
RIR_COLUMNS = ["sample", "row", "col", "value"]
EXCERPT_COLUMNS = ["sample", "time_s", "h00", "h00_windowed", "window"]
EIGEN_COLUMNS = ["index", "value", "value_db"]
MATRIX_COLUMNS = ["row", "col", "re", "im"]
MUSIC_COLUMNS = ["theta_deg", "phi_deg", "value_db"]

DOA_SCHEMA = {
    "type": "object",
    "required": ["num_signals", "peak_deficit", "estimates", "truth"],
    "properties": {
        "num_signals": {"type": "integer", "minimum": 1},
        "peak_deficit": {"type": "boolean"},
        "estimates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["theta_deg", "phi_deg", "value_db"],
                "properties": {
                    "theta_deg": {"type": "number"},
                    "phi_deg": {"type": "number"},
                    "value_db": {"type": "number"},
                },
            },
        },
        "truth": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["theta_deg", "phi_deg", "error_deg"],
                "properties": {
                    "theta_deg": {"type": "number"},
                    "phi_deg": {"type": "number"},
                    "error_deg": {"type": ["number", "null"]},
                },
            },
        },
    },
}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["method", "signal_count", "num_signals", "doa_pass", "peak_deficit", "files"],
    "properties": {
        "method": {"enum": ["modal", "frequency", "combined"]},
        "signal_count": {"type": "integer"},
        "num_signals": {"type": "integer"},
        "doa_pass": {"type": "boolean"},
        "peak_deficit": {"type": "boolean"},
        "max_error_deg": {"type": ["number", "null"]},
        "files": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

CROSS_SPECTRUM_SCHEMA = {
    "type": "object",
    "required": ["estimator", "dim"],
    "properties": {"estimator": {"type": "string"}, "dim": {"type": "integer"}},
}


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x):
    return repr(float(x))


def write_reflections_csv(path, rows):
    write_csv(path, REFLECTION_COLUMNS, [[r[c] for c in REFLECTION_COLUMNS] for r in rows])


def write_spectrum_csv(path, spec):
    rows = []
    _, n_r, n_c = spec.mats.shape
    for i, k in enumerate(spec.bins):
        for r in range(n_r):
            for c in range(n_c):
                z = spec.mats[i, r, c]
                rows.append([int(k), _fmt(spec.freqs[i]), r, c, _fmt(z.real), _fmt(z.imag)])
    write_csv(path, SPECTRUM_COLUMNS, rows)


def write_rir_csv(path, x, max_samples=None):
    n = x.shape[0] if max_samples is None else min(max_samples, x.shape[0])
    rows = []
    for s in range(n):
        for r in range(x.shape[1]):
            for c in range(x.shape[2]):
                rows.append([s, r, c, _fmt(x[s, r, c])])
    write_csv(path, RIR_COLUMNS, rows)


def write_matrix_csv(path, mat):
    rows = [
        [r, c, _fmt(mat[r, c].real), _fmt(mat[r, c].imag)]
        for r in range(mat.shape[0])
        for c in range(mat.shape[1])
    ]
    write_csv(path, MATRIX_COLUMNS, rows)


def write_eigenvalues_csv(path, values, values_db):
    write_csv(
        path,
        EIGEN_COLUMNS,
        [[i + 1, _fmt(v), _fmt(d)] for i, (v, d) in enumerate(zip(values, values_db))],
    )


def write_music_csv(path, spectrum):
    vals = spectrum.values
    db = 10.0 * np.log10(vals / vals.max())
    th = np.rad2deg(spectrum.grid.theta)
    ph = np.rad2deg(spectrum.grid.phi)
    write_csv(
        path,
        MUSIC_COLUMNS,
        [[f"{t:.6f}", f"{p:.6f}", f"{d:.6f}"] for t, p, d in zip(th, ph, db)],
    )


# binary container -----------------------------------------------------------


def write_container(path, data, index, fs, n_fft):
    data = np.asarray(data)
    kind = 0 if np.iscomplexobj(data) else 1
    n, rows, cols = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, kind, n, rows, cols, n_fft, 0, float(fs)))
        fh.write(np.asarray(index, dtype="<i8").tobytes())
        if kind == 0:
            payload = np.empty(data.shape + (2,), dtype="<f8")
            payload[..., 0] = data.real
            payload[..., 1] = data.imag
        else:
            payload = data.astype("<f8")
        fh.write(payload.tobytes())


def read_container(path):
    """Return (data, index, fs, n_fft)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, kind, n, rows, cols, n_fft, _, fs = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a matrix container")
        index = np.frombuffer(fh.read(8 * n), dtype="<i8").copy()
        if kind == 0:
            raw = np.frombuffer(fh.read(16 * n * rows * cols), dtype="<f8").reshape(n, rows, cols, 2)
            data = raw[..., 0] + 1j * raw[..., 1]
        elif kind == 1:
            data = np.frombuffer(fh.read(8 * n * rows * cols), dtype="<f8").reshape(n, rows, cols).copy()
        else:
            raise ValueError(f"{path}: unknown container kind {kind}")
    return data, index, fs, n_fft


def write_spectrum(path, spec):
    write_container(path, spec.mats, spec.bins, spec.fs, spec.n_fft)


def read_spectrum(path):
    data, index, fs, n_fft = read_container(path)
    if not np.iscomplexobj(data):
        raise ValueError(f"{path}: holds a time series, not a spectrum")
    return SpectrumMatrix(freqs=index * fs / n_fft, mats=data, fs=fs, n_fft=n_fft, bins=index)
