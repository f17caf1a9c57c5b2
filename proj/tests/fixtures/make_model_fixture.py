#!/usr/bin/env python3
"""Writes tiny_model.cem and tiny_model_expected.txt.

Independent writer for the model file layout, plus a float64 forward pass
of the stored float32 parameters on a fixed input.
"""
import struct
import zlib
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent

# (kind, filter_len, stride, out_channels, pool, out_features)
CONV, AVG, MAX, DENSE, RELU, LINEAR = range(6)
LAYERS = [
    (CONV, 3, 1, 2, 0, 0),
    (RELU, 0, 1, 0, 0, 0),
    (AVG, 0, 1, 0, 2, 0),
    (LINEAR, 0, 1, 0, 0, 1),
]
INPUT_LEN, INPUT_CH = 6, 2

rng = np.random.default_rng(20260101)
conv_w = rng.uniform(-1, 1, size=(3 * 2, 2)).astype(np.float32)  # rows l*ch_i + c
conv_b = rng.uniform(-0.5, 0.5, size=2).astype(np.float32)
# conv K = 4, pool -> (2, 2), flatten 4
lin_w = rng.uniform(-1, 1, size=(4, 1)).astype(np.float32)
lin_b = rng.uniform(-0.5, 0.5, size=1).astype(np.float32)
params = [(conv_w, conv_b), (None, None), (None, None), (lin_w, lin_b)]


def s(x: str) -> bytes:
    b = x.encode()
    return struct.pack("<I", len(b)) + b


def tensor(t) -> bytes:
    if t is None:
        return struct.pack("<Q", 0)
    flat = np.ascontiguousarray(t, dtype="<f4").ravel()
    return struct.pack("<Q", flat.size) + flat.tobytes()


body = b"CEM1" + struct.pack("<IB", 1, 4)
body += struct.pack("<IIBdI", INPUT_LEN, INPUT_CH, 1, 50e3, len(LAYERS))
for kind, fl, st, oc, pool, of in LAYERS:
    body += struct.pack("<Biiiii", kind, fl, st, oc, pool, of)
# loss, lr, epochs, patience, factor, batch, seed, threads, best epoch, best val
body += struct.pack("<BdiidQQiid", 0, 1e-3, 100, 10, 0.5, 256, 42, 1, 17, 0.125)
body += s("cfo") + s("awgn") + struct.pack("<dIQ", 10.0, 6, 7) + s("burstsync-1.0.0") + struct.pack("<Q", 20000)
for w, b in params:
    body += tensor(w) + tensor(b)
body += struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)
(OUT / "tiny_model.cem").write_bytes(body)

# Fixed input, RMS normalized as the library does for IQ buffers.
iq = np.array([complex(0.1 * k, -0.05 * k * k + 0.3) for k in range(INPUT_LEN)])
scale = 1.0 / np.sqrt(np.mean(np.abs(iq) ** 2))
x = np.stack([iq.real, iq.imag], axis=1) * scale  # (6, 2)
x = x.astype(np.float32).astype(np.float64)
W = conv_w.astype(np.float64)
y = np.zeros((4, 2))
for k in range(4):
    window = x[k : k + 3].reshape(-1)  # index l*2 + c
    y[k] = window @ W + conv_b
y = np.maximum(y, 0)
p = y.reshape(2, 2, 2).mean(axis=1)  # pool pairs of rows
out = float(p.reshape(-1) @ lin_w[:, 0].astype(np.float64) + lin_b[0])
lines = [f"{float(v.real)!r} {float(v.imag)!r}" for v in iq]
(OUT / "tiny_model_expected.txt").write_text(
    "# iq samples then the expected physical-unit prediction\n" + "\n".join(lines) + f"\n{out * 50e3!r}\n"
)
print("wrote", OUT / "tiny_model.cem", len(body), "bytes; prediction", out * 50e3)
