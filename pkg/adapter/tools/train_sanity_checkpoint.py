#!/usr/bin/env python3
"""Train the bundled sanity checkpoint (logistic regression, plain numpy).

Fits the linear head on features of the deterministic sanity fixtures and
writes src/deepfake_adapter/data/sanity_checkpoint.npz.  Rerunning
reproduces the same file.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from deepfake_adapter.features import FEATURE_VERSION, band_log_energies
from deepfake_adapter.fixtures import sanity_clip
from deepfake_adapter.wavio import prepare

OUT = Path(__file__).parent.parent / "src" / "deepfake_adapter" / "data" / "sanity_checkpoint.npz"
N_PER_CLASS = 40


def main() -> None:
    feats, labels = [], []
    for kind, y in (("bona_fide", 0.0), ("spoof", 1.0)):
        for i in range(N_PER_CLASS):
            x = prepare(sanity_clip(kind, i), f"train_{kind}_{i}")
            feats.append(band_log_energies(x))
            labels.append(y)
    X = np.stack(feats)
    y = np.asarray(labels)

    mean, std = X.mean(axis=0), X.std(axis=0) + 1e-9
    Xn = (X - mean) / std
    w = np.zeros(X.shape[1])
    b = 0.0
    lr = 0.5
    for _ in range(2000):
        p = 1.0 / (1.0 + np.exp(-(Xn @ w + b)))
        grad_w = Xn.T @ (p - y) / len(y) + 1e-3 * w
        grad_b = float(np.mean(p - y))
        w -= lr * grad_w
        b -= lr * grad_b

    # fold the normalization into the stored affine head
    weights = w / std
    bias = b - float((w * mean / std).sum())
    acc = float(np.mean(((X @ weights + bias) > 0) == (y == 1.0)))
    print(f"train accuracy: {acc:.3f}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        OUT,
        weights=weights,
        bias=bias,
        polarity=1,
        feature_version=FEATURE_VERSION,
    )
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
