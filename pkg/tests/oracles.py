"""Brute-force reference implementations the fast paths are checked against.

Everything here favors literal definitions over speed: dense 2-D
convolution loops instead of separable passes, and exact rational
arithmetic for the threshold objective instead of cumulative tricks.
"""

from fractions import Fraction
import math

import numpy as np


def dense_convolve_2d(data: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Per-pixel 2-D convolution with symmetric (edge-repeating) borders."""
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    padded = np.pad(np.asarray(data, dtype=np.float64), ((rh, rh), (rw, rw)), mode="symmetric")
    h, w = data.shape
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for di in range(kh):
                for dj in range(kw):
                    acc += kernel[di, dj] * padded[i + di, j + dj]
            out[i, j] = acc
    return out


def gaussian_kernel_2d(sigma: float) -> np.ndarray:
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    k1 = np.exp(-(offsets**2) / (2 * sigma * sigma))
    k1 /= k1.sum()
    return np.outer(k1, k1)


def dense_gaussian_blur(data: np.ndarray, sigma: float) -> np.ndarray:
    """Unrounded blur reference: one dense 2-D convolution."""
    return dense_convolve_2d(data, gaussian_kernel_2d(sigma))


SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)


def dense_sobel_magnitude(data: np.ndarray) -> np.ndarray:
    """Unrounded Sobel reference: two dense convolutions and a hypotenuse."""
    gx = dense_convolve_2d(data, SOBEL_X)
    gy = dense_convolve_2d(data, SOBEL_X.T)
    return np.sqrt(gx * gx + gy * gy)


def brute_force_otsu(pixels: np.ndarray) -> int:
    """Scan all 256 thresholds with exact rational arithmetic.

    Maximizes w0 * w1 * (mu0 - mu1)**2 with classes {<= t} and {> t};
    ties break to the smallest t.
    """
    flat = [int(v) for v in np.asarray(pixels).ravel()]
    total = len(flat)
    hist = [0] * 256
    for v in flat:
        hist[v] += 1
    best_t = -1
    best_score = Fraction(0)
    for t in range(256):
        n0 = sum(hist[v] for v in range(t + 1))
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        w0 = Fraction(n0, total)
        w1 = Fraction(n1, total)
        mu0 = Fraction(sum(v * hist[v] for v in range(t + 1)), n0)
        mu1 = Fraction(sum(v * hist[v] for v in range(t + 1, 256)), n1)
        score = w0 * w1 * (mu0 - mu1) ** 2
        if score > best_score:
            best_t, best_score = t, score
    return best_t
